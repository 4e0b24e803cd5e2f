//! Command-line front end for LTLf synthesis under partial
//! observability: inline or file-based problem ingestion, on-the-fly or
//! full-construction solving, controller and automaton export, and a
//! CSV benchmark harness.

mod args;
mod bench;
mod problem;
mod solve;

use clap::Parser;

fn main() {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match &cli.command {
        Some(args::Command::Bench(b)) => bench::run(b),
        None => solve::run(&cli.solve),
    };
    std::process::exit(code);
}
