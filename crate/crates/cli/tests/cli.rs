//! End-to-end tests of the `beliefsynt` binary: exit codes, file ingestion,
//! output shapes, determinism, and the bench subcommand.

use std::io::Write;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_beliefsynt"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

const HIDDEN_SPEC: &str = "(G F u -> F (i <-> o)) & (G F !u -> F (i | o))";

fn hidden_args(extra: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = [
        "--formula",
        HIDDEN_SPEC,
        "--ins",
        "i",
        "--outs",
        "o",
        "--unobservable-ins",
        "u",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

#[test]
fn realizable_specs_exit_zero_and_print_the_verdict() {
    let out = run(&hidden_args(&[]).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "REALIZABLE\n");
}

#[test]
fn unrealizable_specs_exit_one() {
    let out = run(&["--formula", "G (o & !o)", "--outs", "o"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_of(&out), "UNREALIZABLE\n");
}

#[test]
fn syntax_errors_exit_two_with_a_diagnostic() {
    let out = run(&["--formula", "F (q", "--ins", "q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_of(&out).is_empty());
    let err = stderr_of(&out);
    assert!(err.contains("syntax error"), "stderr: {err}");
}

#[test]
fn bad_partitions_exit_two() {
    let dup = run(&["--formula", "q", "--ins", "q", "--outs", "q"]);
    assert_eq!(dup.status.code(), Some(2));
    assert!(stderr_of(&dup).contains("declared more than once"));

    let unknown = run(&["--formula", "p & q", "--ins", "p"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(stderr_of(&unknown).contains("undeclared"));

    let hidden_out = run(&["--formula", "o", "--outs", "o", "--unobservable-ins", "o"]);
    assert_eq!(hidden_out.status.code(), Some(2));
    assert!(stderr_of(&hidden_out).contains("observable by definition"));
}

#[test]
fn state_and_time_limits_exit_three() {
    let capped = run(&hidden_args(&["--max-states", "1"])
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>());
    assert_eq!(capped.status.code(), Some(3), "stderr: {}", stderr_of(&capped));
    assert!(stderr_of(&capped).contains("state limit"));

    let timed = run(&hidden_args(&["--timeout-ms", "0"])
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>());
    assert_eq!(timed.status.code(), Some(3));
    assert!(stderr_of(&timed).contains("time budget"));
}

#[test]
fn help_exits_zero_and_bad_flags_exit_two() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout_of(&help).contains("--semantics"));

    let bad = run(&["--formula", "tt", "--no-such-flag"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn file_and_partition_inputs_load_like_inline_ones() {
    let dir = tempfile::tempdir().expect("tempdir");
    let ltlf = dir.path().join("spec.ltlf");
    let part = dir.path().join("spec.part");
    std::fs::write(&ltlf, "F (req -> grant)\n").unwrap();
    std::fs::write(&part, ".inputs: req\n.outputs: grant\n").unwrap();

    let explicit = run(&[
        "--file",
        ltlf.to_str().unwrap(),
        "--part",
        part.to_str().unwrap(),
    ]);
    assert_eq!(explicit.status.code(), Some(0), "stderr: {}", stderr_of(&explicit));
    assert_eq!(stdout_of(&explicit), "REALIZABLE\n");

    let sibling = run(&["--file", ltlf.to_str().unwrap()]);
    assert_eq!(sibling.status.code(), Some(0));

    let inline = run(&["--formula", "F (req -> grant)", "--ins", "req", "--outs", "grant"]);
    assert_eq!(stdout_of(&sibling), stdout_of(&inline));
}

#[test]
fn hiding_a_declared_output_is_rejected_in_file_mode() {
    let dir = tempfile::tempdir().expect("tempdir");
    let ltlf = dir.path().join("bad.ltlf");
    let part = dir.path().join("bad.part");
    std::fs::write(&ltlf, "g\n").unwrap();
    std::fs::write(&part, ".inputs: r\n.outputs: g\n").unwrap();

    let out = run(&[
        "--file",
        ltlf.to_str().unwrap(),
        "--part",
        part.to_str().unwrap(),
        "--unobservable-ins",
        "g",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("observable by definition"));
}

#[test]
fn printed_strategies_have_the_documented_shape() {
    let out = run(&hidden_args(&["--print-strategy"])
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("REALIZABLE\n"));
    assert!(text.contains("semantics: mealy\n"));
    assert!(text.contains("ins: i\n"));
    assert!(text.contains("outs: o\n"));
    assert!(text.contains("init: S0\n"));
    assert!(text.contains("-> TERMINATE"));

    let dot = run(&hidden_args(&["--print-strategy", "--format", "dot"])
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>());
    assert_eq!(dot.status.code(), Some(0));
    assert!(stdout_of(&dot).contains("digraph controller"));
}

#[test]
fn printed_automata_cover_both_modes() {
    fn sources(text: &str) -> std::collections::HashSet<&str> {
        text.lines()
            .skip(1)
            .filter_map(|l| l.split('"').nth(1))
            .collect()
    }

    let otf = run(&hidden_args(&["--print-automaton"])
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>());
    assert_eq!(otf.status.code(), Some(0));
    let otf_text = stdout_of(&otf);

    let full = run(&hidden_args(&["--print-automaton", "--mode", "full"])
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>());
    assert_eq!(full.status.code(), Some(0));
    let full_text = stdout_of(&full);

    // Full construction reaches all four belief states; the lazy mode
    // prints only what the solver had to explore, a strict subset here.
    assert_eq!(sources(&full_text).len(), 4, "full: {full_text}");
    assert!(sources(&otf_text).len() < 4, "otf: {otf_text}");
    assert!(sources(&otf_text).is_subset(&sources(&full_text)));
    for line in otf_text.lines().skip(1) {
        assert!(full_text.lines().any(|l| l == line), "missing: {line}");
    }

    let dot = run(&hidden_args(&["--print-automaton", "--format", "dot"])
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>());
    assert!(stdout_of(&dot).contains("digraph mtbdd"));
}

#[test]
fn stats_go_to_stderr_as_a_single_json_line() {
    let out = run(&hidden_args(&["--stats", "json"])
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "REALIZABLE\n");
    let err = stderr_of(&out);
    let line = err.lines().last().expect("stats line");
    assert!(line.starts_with("{\"state_count\":"));
    assert!(line.contains("\"delta_count\":"));
    assert!(line.contains("\"node_count\":"));
    assert!(line.contains("\"cache_hits\":"));
    assert!(line.ends_with('}'));
    let wall = line.find("\"wall_ms\":").expect("wall_ms present");
    assert!(line[wall..].trim_end_matches('}').len() > "\"wall_ms\":".len());
}

#[test]
fn bench_emits_one_csv_row_per_instance_rep_and_mode() {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let out = run(&[
        "bench",
        "--dir",
        fixtures,
        "--reps",
        "3",
        "--hide-fraction",
        "0.5",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("instance,rep,hidden_set,mode,verdict,states,deltas,nodes,ms,status")
    );

    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 10));

    // echo3 has two inputs, so hiding one admits only two distinct draws:
    // the third rep must report exhaustion instead of repeating a set.
    let echo_rows: Vec<_> = rows.iter().filter(|r| r[0] == "echo3").collect();
    assert!(echo_rows.iter().any(|r| r[9] == "exhausted"));
    let echo_sets: std::collections::HashSet<&str> = echo_rows
        .iter()
        .filter(|r| r[9] == "ok")
        .map(|r| r[2])
        .collect();
    assert_eq!(echo_sets.len(), 2, "rows: {text}");

    // Every ok rep carries one otf row and one full row with equal verdicts.
    for row in rows.iter().filter(|r| r[9] == "ok") {
        assert!(row[3] == "otf" || row[3] == "full");
        assert!(row[4] == "REALIZABLE" || row[4] == "UNREALIZABLE");
        let partner: Vec<_> = rows
            .iter()
            .filter(|r| r[0] == row[0] && r[1] == row[1] && r[3] != row[3])
            .collect();
        assert_eq!(partner.len(), 1);
        assert_eq!(partner[0][4], row[4]);
    }

    // Laziness shows up in the data: no otf row explores more than its
    // full-mode partner's state count.
    for row in rows.iter().filter(|r| r[9] == "ok" && r[3] == "otf") {
        let full = rows
            .iter()
            .find(|r| r[0] == row[0] && r[1] == row[1] && r[3] == "full")
            .expect("paired row");
        let deltas: u64 = row[6].parse().unwrap();
        let states: u64 = full[5].parse().unwrap();
        assert!(deltas <= states, "otf {deltas} vs full {states}");
    }
}

#[test]
fn bench_skips_unreadable_instances_without_failing() {
    let dir = tempfile::tempdir().expect("tempdir");
    std::fs::write(dir.path().join("good.ltlf"), "F (a <-> b)\n").unwrap();
    std::fs::write(dir.path().join("good.part"), ".inputs: a\n.outputs: b\n").unwrap();
    let mut broken = std::fs::File::create(dir.path().join("broken.ltlf")).unwrap();
    writeln!(broken, "F (").unwrap();

    let out = run(&[
        "bench",
        "--dir",
        dir.path().to_str().unwrap(),
        "--reps",
        "1",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.lines().any(|l| l.starts_with("broken,0") && l.ends_with("skipped")));
    assert!(text.lines().any(|l| l.starts_with("good,1")));
}
