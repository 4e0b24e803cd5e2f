//! Command-line surface. Parsing is delegated to clap; everything the
//! rest of the binary needs arrives as typed values.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "beliefsynt",
    version,
    about = "Realizability and synthesis for LTLf specifications under partial observability",
    after_help = "Strong next may be written X[!] or N; weak next is X. \
                  Variable lists are comma- or whitespace-separated."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a directory of .ltlf/.part instances under randomly hidden
    /// inputs and report per-run statistics as CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// LTLf formula text
    #[arg(long, value_name = "FORMULA")]
    pub formula: Option<String>,

    /// Read the formula from a .ltlf file instead
    #[arg(long, value_name = "PATH", conflicts_with = "formula")]
    pub file: Option<PathBuf>,

    /// Variable partition file (defaults to the formula file with a
    /// .part extension)
    #[arg(long, value_name = "PATH", requires = "file")]
    pub part: Option<PathBuf>,

    /// Input variable names
    #[arg(long, value_name = "NAMES", default_value = "", conflicts_with = "file")]
    pub ins: String,

    /// Output variable names
    #[arg(long, value_name = "NAMES", default_value = "", conflicts_with = "file")]
    pub outs: String,

    /// Inputs the controller cannot observe. Inline: an additional
    /// variable block. With --file: names subtracted from the declared
    /// inputs.
    #[arg(long = "unobservable-ins", value_name = "NAMES", default_value = "")]
    pub unobservable_ins: String,

    /// Whether outputs may depend on the current input
    #[arg(long, value_enum, default_value_t = SemanticsArg::Mealy)]
    pub semantics: SemanticsArg,

    /// Interleave construction with solving (otf) or build the full
    /// belief automaton first (full)
    #[arg(long, value_enum, default_value_t = ModeArg::Otf)]
    pub mode: ModeArg,

    /// Print the synthesized controller when realizable
    #[arg(long)]
    pub print_strategy: bool,

    /// Print the belief automaton (the explored part in otf mode)
    #[arg(long)]
    pub print_automaton: bool,

    /// Output format for printed artifacts
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,

    /// Emit a statistics record to standard error
    #[arg(long, value_enum, value_name = "FORMAT")]
    pub stats: Option<StatsArg>,

    /// Abort after this many belief states
    #[arg(long, value_name = "N", default_value_t = 1_000_000)]
    pub max_states: usize,

    /// Abort after this many diagram nodes
    #[arg(long, value_name = "N", default_value_t = 10_000_000)]
    pub max_nodes: usize,

    /// Cooperative wall-clock budget for the solve
    #[arg(long, value_name = "MS")]
    pub timeout_ms: Option<u64>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory containing .ltlf/.part pairs
    #[arg(long, value_name = "DIR")]
    pub dir: PathBuf,

    /// Hidden-input draws per instance
    #[arg(long, value_name = "N", default_value_t = 10)]
    pub reps: u32,

    /// Fraction of inputs hidden in each draw
    #[arg(long, value_name = "F", default_value_t = 0.5)]
    pub hide_fraction: f64,

    /// Seed for the hidden-input draws
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    pub seed: u64,

    /// Cooperative per-run time budget
    #[arg(long, value_name = "MS", default_value_t = 90_000)]
    pub timeout_ms: u64,

    /// Abort a run after this many belief states
    #[arg(long, value_name = "N", default_value_t = 1_000_000)]
    pub max_states: usize,

    /// Abort a run after this many diagram nodes
    #[arg(long, value_name = "N", default_value_t = 10_000_000)]
    pub max_nodes: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemanticsArg {
    Mealy,
    Moore,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Otf,
    Full,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Text,
    Dot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatsArg {
    Json,
}
