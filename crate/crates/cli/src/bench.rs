//! Benchmark harness: replays a directory of .ltlf/.part instances,
//! hiding a fresh random subset of each instance's inputs per
//! repetition, running both solving modes, and emitting one CSV row per
//! run. Disagreements between the modes, or a lazy run that computes
//! more transition functions than the full automaton has states, are
//! flagged and fail the process.

use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use beliefsynt_core::{Error, Limit, Limits, Semantics};

use crate::args::{BenchArgs, ModeArg};
use crate::problem::{parse_part, partition_with_hidden};
use crate::solve::synthesize;

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All k-subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Fresh hidden subsets for one instance: when the subset space is
/// small it is enumerated and shuffled, otherwise subsets are drawn
/// directly with a freshness check. Either way the draw sequence is a
/// pure function of the seed and the instance name.
fn hidden_draws(n: usize, k: usize, reps: u32, rng: &mut Rng) -> Vec<Vec<usize>> {
    let total = binomial(n, k);
    if total <= 1 << 16 {
        let mut all = combinations(n, k);
        for i in (1..all.len()).rev() {
            all.swap(i, rng.below(i as u64 + 1) as usize);
        }
        all.truncate(reps as usize);
        all
    } else {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        while out.len() < reps as usize {
            let mut pool: Vec<usize> = (0..n).collect();
            for i in (1..pool.len()).rev() {
                pool.swap(i, rng.below(i as u64 + 1) as usize);
            }
            let mut subset: Vec<usize> = pool[..k].to_vec();
            subset.sort_unstable();
            if seen.insert(subset.clone()) {
                out.push(subset);
            }
        }
        out
    }
}

struct RunRow {
    verdict: &'static str,
    states: usize,
    deltas: usize,
    nodes: usize,
    ms: u64,
    status: &'static str,
}

fn run_one(
    ins: &[String],
    outs: &[String],
    hidden: &[&str],
    formula: &str,
    mode: ModeArg,
    args: &BenchArgs,
) -> RunRow {
    let error_row = |status: &'static str, ms: u64| RunRow {
        verdict: "",
        states: 0,
        deltas: 0,
        nodes: 0,
        ms,
        status,
    };
    let ctx = match partition_with_hidden(ins, outs, hidden, Semantics::Mealy) {
        Ok(c) => c,
        Err(_) => return error_row("error", 0),
    };
    let f = match ctx.parse(formula) {
        Ok(f) => f,
        Err(_) => return error_row("error", 0),
    };
    let start = Instant::now();
    let end = start + Duration::from_millis(args.timeout_ms);
    let deadline = move || Instant::now() >= end;
    let limits = Limits {
        max_states: args.max_states,
        max_nodes: args.max_nodes,
        deadline: Some(&deadline),
    };
    match synthesize(&ctx, f, mode, &limits) {
        Ok(run) => RunRow {
            verdict: if run.result.realizable { "REALIZABLE" } else { "UNREALIZABLE" },
            states: run.result.stats.state_count,
            deltas: run.result.stats.delta_count,
            nodes: run.result.stats.node_count,
            ms: start.elapsed().as_millis() as u64,
            status: "ok",
        },
        Err(Error::ResourceLimit { limit: Limit::Time }) => {
            error_row("timeout", start.elapsed().as_millis() as u64)
        }
        Err(Error::ResourceLimit { .. }) => {
            error_row("limit", start.elapsed().as_millis() as u64)
        }
        Err(_) => error_row("error", start.elapsed().as_millis() as u64),
    }
}

pub fn run(args: &BenchArgs) -> i32 {
    let entries = match fs::read_dir(&args.dir) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.dir.display());
            return 2;
        }
    };
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ltlf"))
        .collect();
    paths.sort();

    println!("instance,rep,hidden_set,mode,verdict,states,deltas,nodes,ms,status");
    let mut failed = false;
    for path in paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let loaded = fs::read_to_string(&path).ok().and_then(|formula| {
            let part = fs::read_to_string(path.with_extension("part")).ok()?;
            let (ins, outs) = parse_part(&part).ok()?;
            Some((formula.trim().to_string(), ins, outs))
        });
        let Some((formula, ins, outs)) = loaded else {
            eprintln!("warning: skipping unreadable instance {name}");
            println!("{name},0,,,,,,,,skipped");
            continue;
        };
        let n = ins.len();
        let k = ((args.hide_fraction * n as f64).round() as usize).min(n);
        let mut rng = Rng(args.seed ^ fnv1a(&name));
        let draws = hidden_draws(n, k, args.reps, &mut rng);
        for rep in 1..=args.reps {
            let Some(subset) = draws.get((rep - 1) as usize) else {
                println!("{name},{rep},,,,,,,,exhausted");
                break;
            };
            let hidden: Vec<&str> = subset.iter().map(|&i| ins[i].as_str()).collect();
            let hidden_set = hidden.join(";");
            let otf = run_one(&ins, &outs, &hidden, &formula, ModeArg::Otf, args);
            let full = run_one(&ins, &outs, &hidden, &formula, ModeArg::Full, args);
            let mut status_otf = otf.status;
            let mut status_full = full.status;
            if otf.status == "ok" && full.status == "ok" {
                if otf.verdict != full.verdict {
                    status_otf = "mismatch";
                    status_full = "mismatch";
                    failed = true;
                } else if otf.deltas > full.states {
                    status_otf = "violation";
                    status_full = "violation";
                    failed = true;
                }
            }
            for (mode, row, status) in
                [("otf", &otf, status_otf), ("full", &full, status_full)]
            {
                println!(
                    "{name},{rep},{hidden_set},{mode},{},{},{},{},{},{status}",
                    row.verdict, row.states, row.deltas, row.nodes, row.ms
                );
            }
        }
    }
    if failed {
        eprintln!("error: mode disagreement or laziness violation detected");
        1
    } else {
        0
    }
}
