//! `dnnscope` command-line front end.
//!
//! Exit codes: 0 success, 1 constraint or validation failure, 2 usage
//! error, 3 I/O or format error.

mod commands;
mod error;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;
use model::ModelArgs;

#[derive(Parser)]
#[command(name = "dnnscope", version, about = "Cost modeling, design-space exploration and weight compression for CNNs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the cost metrics of one architecture.
    Describe(DescribeArgs),
    /// Evaluate a family over a metaparameter grid.
    Sweep(SweepArgs),
    /// Keep only the non-dominated rows of a points CSV.
    Pareto(ParetoArgs),
    /// Check one architecture against deployment budgets.
    Check(CheckArgs),
    /// Prune, quantize and entropy-code an SDNW weight file.
    Compress(CompressArgs),
    /// Expand an SDNC container back into an SDNW weight file.
    Decompress(DecompressArgs),
    /// Run the oracle property suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct DescribeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Also write the architecture descriptor here.
    #[arg(long)]
    pub emit_arch: Option<PathBuf>,
    /// Also write seeded random weights (SDNW) here.
    #[arg(long)]
    pub emit_weights: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: String,
    /// JSON object mapping metaparameter names to value lists.
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long)]
    pub platform: Option<PathBuf>,
    /// CSV of recorded top-5 error keyed by metaparameters.
    #[arg(long)]
    pub accuracy: Option<PathBuf>,
    /// Metric that orders points for saturation detection, e.g. total_params.
    #[arg(long)]
    pub saturation_axis: Option<String>,
    #[arg(long, default_value_t = dnnscope::dse::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Objectives for the Pareto flag, e.g. `total_params:min,top5_error:min`.
    #[arg(long)]
    pub objectives: Option<String>,
    /// Write `<prefix>.csv` and `<prefix>.json` instead of printing CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = dnnscope::dse::DEFAULT_SWEEP_CAP)]
    pub cap: usize,
}

#[derive(Args)]
pub struct ParetoArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub objectives: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CheckArgs {
    /// A report or design point JSON, as written by `describe --format json`.
    #[arg(long, conflicts_with_all = ["arch", "family"])]
    pub point: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub constraints: PathBuf,
    /// Recorded top-5 error of the model, as a fraction.
    #[arg(long)]
    pub top5_error: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args)]
pub struct CompressArgs {
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long, default_value_t = 0.7)]
    pub sparsity: f64,
    #[arg(long, default_value_t = 6)]
    pub bits: u8,
    #[arg(long, default_value_t = dnnscope::compress::DEFAULT_REL_INDEX_BITS)]
    pub rel_index_bits: u8,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args)]
pub struct DecompressArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random cases per property.
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    /// Also check that this container re-encodes to itself.
    #[arg(long)]
    pub container: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Describe(a) => commands::describe(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Pareto(a) => commands::pareto(a),
        Command::Check(a) => commands::check(a),
        Command::Compress(a) => commands::compress(a),
        Command::Decompress(a) => commands::decompress(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e)
    }
}
