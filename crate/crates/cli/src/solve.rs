//! A single synthesis run: resolve the problem, solve it in the chosen
//! mode, print verdict and requested artifacts, and map errors onto the
//! exit-code contract.

use std::time::{Duration, Instant};

use beliefsynt_core::{
    build_controller, build_full, controller_dot, export_controller, solve_full, solve_otf,
    translate, Context, Error, FormulaId, GameResult, Limit, Limits, Mtdfa, Stats,
};

use crate::args::{FormatArg, ModeArg, SolveArgs, StatsArg};
use crate::problem;

/// Solver output together with the automaton that was actually
/// materialized: the complete one in full mode, the explored part in
/// otf mode.
pub struct RunResult {
    pub result: GameResult,
    pub automaton: Mtdfa,
}

pub fn synthesize(
    ctx: &Context,
    f: FormulaId,
    mode: ModeArg,
    limits: &Limits,
) -> Result<RunResult, Error> {
    match mode {
        ModeArg::Full => {
            let automaton = build_full(ctx, f, limits)?;
            let result = solve_full(ctx, &automaton);
            Ok(RunResult { result, automaton })
        }
        ModeArg::Otf => {
            let result = solve_otf(ctx, f, limits)?;
            let automaton = Mtdfa {
                initial: result.analysis.initial,
                states: result.analysis.explored.clone(),
                delta: result.analysis.delta.clone(),
            };
            Ok(RunResult { result, automaton })
        }
    }
}

/// Renders the statistics record as a single flat JSON object.
/// `wall_ms` is deliberately the last field.
pub fn stats_json(stats: &Stats) -> String {
    format!(
        "{{\"state_count\":{},\"delta_count\":{},\"node_count\":{},\"cache_hits\":{},\"wall_ms\":{}}}",
        stats.state_count, stats.delta_count, stats.node_count, stats.cache_hits, stats.wall_ms
    )
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit { .. } => 3,
        _ => 2,
    }
}

fn limit_message(limit: Limit) -> &'static str {
    match limit {
        Limit::States => "state limit exceeded",
        Limit::Nodes => "node limit exceeded",
        Limit::Time => "time budget exceeded",
        Limit::Enumeration => "enumeration budget exceeded",
    }
}

pub fn describe(e: &Error) -> String {
    match e {
        Error::ResourceLimit { limit } => limit_message(*limit).to_string(),
        other => format!("{other}"),
    }
}

pub fn run(args: &SolveArgs) -> i32 {
    let problem = match problem::load(args) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let ctx = problem.context;
    let f = match ctx.parse(&problem.formula_text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    let start = Instant::now();
    let deadline: Option<Box<dyn Fn() -> bool>> = args.timeout_ms.map(|ms| {
        let end = start + Duration::from_millis(ms);
        Box::new(move || Instant::now() >= end) as Box<dyn Fn() -> bool>
    });
    let limits = Limits {
        max_states: args.max_states,
        max_nodes: args.max_nodes,
        deadline: deadline.as_deref(),
    };

    let run = match synthesize(&ctx, f, args.mode, &limits) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            return exit_code_for(&e);
        }
    };
    let mut stats = run.result.stats;
    stats.wall_ms = start.elapsed().as_millis() as u64;

    if run.result.realizable {
        println!("REALIZABLE");
    } else {
        println!("UNREALIZABLE");
    }
    if args.print_automaton {
        print!(
            "{}",
            match args.format {
                FormatArg::Text => translate::to_text(&ctx, &run.automaton),
                FormatArg::Dot => translate::to_dot(&ctx, &run.automaton),
            }
        );
    }
    if args.print_strategy {
        if let Some(strategy) = &run.result.strategy {
            let controller = build_controller(&ctx, strategy);
            print!(
                "{}",
                match args.format {
                    FormatArg::Text => export_controller(&ctx, &controller),
                    FormatArg::Dot => controller_dot(&ctx, &controller),
                }
            );
        }
    }
    if args.stats == Some(StatsArg::Json) {
        eprintln!("{}", stats_json(&stats));
    }
    if run.result.realizable {
        0
    } else {
        1
    }
}
