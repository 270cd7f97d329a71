//! pagesim: simulate paging policies on access graphs and analyze their
//! relative intervals.

mod commands;
mod common;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use common::{CliError, GraphArg};
use pagesim::engine::Algorithm;
use pagesim::families::FamilyId;

#[derive(Parser)]
#[command(
    name = "pagesim",
    version,
    about = "Paging-policy simulation and relative-interval analysis on access graphs",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed echoed into report metadata; every command is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit the report as JSON (with a metadata envelope).
    #[arg(long, conflicts_with = "csv")]
    json: bool,

    /// Emit the payload as CSV.
    #[arg(long)]
    csv: bool,

    /// Write the report to a file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate algorithms over a sequence from a family, an inline list,
    /// or a file.
    Simulate(SimulateArgs),
    /// Check every family's predicted fault counts against simulation.
    ValidateFamilies(ValidateArgs),
    /// Analytic and (optionally) exhaustive empirical relative interval for
    /// an algorithm pair.
    Interval(IntervalArgs),
    /// Render the analytic bounds table for one cache size.
    BoundsTable(BoundsArgs),
    /// Fault-difference ratio curve along a family (CSV by default).
    Curve(CurveArgs),
    /// List the family catalog, or expand one member to JSON.
    Families(FamiliesArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Access graph as class:N (path, star, cycle, complete).
    #[arg(long, value_name = "CLASS:N", conflicts_with = "graph_file")]
    graph: Option<GraphArg>,

    /// Access graph from a JSON file {n_vertices, class_tag, edges}.
    #[arg(long, value_name = "PATH")]
    graph_file: Option<PathBuf>,

    /// Cache size.
    #[arg(long)]
    k: usize,

    /// Sequence family to expand.
    #[arg(long, value_name = "ID", conflicts_with_all = ["seq", "seq_file"])]
    family: Option<String>,

    /// Family repetition parameter.
    #[arg(long, default_value_t = 1)]
    n: usize,

    /// Cycle surplus r = N - k (cycle_rows family).
    #[arg(long)]
    r: Option<u32>,

    /// Inline request sequence, comma-separated page ids.
    #[arg(long, value_name = "1,2,3", conflicts_with = "seq_file")]
    seq: Option<String>,

    /// Request sequence file, one page id per line.
    #[arg(long, value_name = "PATH")]
    seq_file: Option<PathBuf>,

    /// Algorithms to run (default: all four).
    #[arg(long, value_name = "A,B,..", value_delimiter = ',', value_parser = common::parse_alg)]
    algs: Option<Vec<Algorithm>>,

    /// Include the full step trace (JSON lines in text mode).
    #[arg(long)]
    trace: bool,

    /// Include per-phase fault counts.
    #[arg(long)]
    phases: bool,

    /// Skip the respects-the-graph check.
    #[arg(long)]
    no_validate: bool,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Families to validate (default: all).
    #[arg(long, value_name = "ID,ID,..")]
    families: Option<String>,

    #[arg(long, default_value_t = 3)]
    k_min: usize,
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct IntervalArgs {
    /// Ordered algorithm pair A,B for the difference A(I) - B(I).
    #[arg(long, value_name = "A,B", value_parser = common::parse_pair)]
    pair: (Algorithm, Algorithm),

    /// Access graph as class:N.
    #[arg(long, value_name = "CLASS:N", conflicts_with = "graph_file")]
    graph: Option<GraphArg>,

    /// Access graph from a JSON file.
    #[arg(long, value_name = "PATH")]
    graph_file: Option<PathBuf>,

    /// Cache size.
    #[arg(long)]
    k: usize,

    /// Sequence length for the exhaustive empirical search.
    #[arg(long)]
    n: Option<usize>,

    /// Simulation-step budget for the exhaustive search.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BoundsArgs {
    /// Cache size.
    #[arg(long)]
    k: usize,

    /// Cycle surplus for the cycle rows (N = k + r).
    #[arg(long, default_value_t = 1)]
    r: u32,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CurveArgs {
    /// Sequence family.
    #[arg(long, value_name = "ID")]
    family: String,

    /// Cache size.
    #[arg(long)]
    k: usize,

    /// Cycle surplus r = N - k (cycle_rows family).
    #[arg(long)]
    r: Option<u32>,

    /// Graph override as class:N, for families with a free vertex count.
    #[arg(long, value_name = "CLASS:N")]
    graph: Option<GraphArg>,

    /// Ordered algorithm pair (default: the family's natural pair).
    #[arg(long, value_name = "A,B", value_parser = common::parse_pair)]
    pair: Option<(Algorithm, Algorithm)>,

    /// Repetition counts to evaluate.
    #[arg(long, value_name = "1,2,5,..", value_delimiter = ',')]
    n_list: Vec<usize>,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FamiliesArgs {
    /// Expand this family to JSON instead of listing the catalog.
    #[arg(long, value_name = "ID")]
    expand: Option<String>,

    #[arg(long, requires = "expand")]
    k: Option<usize>,

    #[arg(long, requires = "expand", default_value_t = 1)]
    n: usize,

    #[arg(long)]
    r: Option<u32>,

    /// Graph override as class:N for families with a free vertex count.
    #[arg(long, value_name = "CLASS:N")]
    graph: Option<GraphArg>,

    #[command(flatten)]
    output: OutputArgs,
}

fn parse_family(s: &str) -> Result<FamilyId, CliError> {
    s.parse().map_err(|e| {
        CliError::usage(format!(
            "{e}; known families: {}",
            FamilyId::ALL.map(|f| f.as_str()).join(", ")
        ))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let seed = cli.seed;
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args, seed),
        Command::ValidateFamilies(args) => commands::validate_families(args, seed),
        Command::Interval(args) => commands::interval(args, seed),
        Command::BoundsTable(args) => commands::bounds_table(args, seed),
        Command::Curve(args) => commands::curve(args, seed),
        Command::Families(args) => commands::families(args, seed),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
