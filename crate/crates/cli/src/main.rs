mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  one or more trials failed (sweep) or an oracle comparison failed
  2  usage, configuration or I/O error
  3  indeterminate oracle check (some trials with an outlier, some without)

Environment:
  SPIKED_UNFOLD_MEM_CAP  maximum number of tensor entries (default 200000000)";

/// Spiked matrix and tensor experiments on long random matrices.
#[derive(Debug, Parser)]
#[command(name = "spiked-unfold", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Outlier location and overlaps predicted for a rank-one spike.
    ///
    /// Give either --phi, or --n and --k for the tensor form (with --q for
    /// the unfolding along q axes).
    #[command(after_help = EXIT_CODES)]
    Predict(PredictArgs),
    /// Run a Monte Carlo sweep and write records, aggregates and plots.
    ///
    /// Either --config PATH, or --n with --m (matrix) or --k (tensor).
    #[command(after_help = EXIT_CODES)]
    Sweep(SweepArgs),
    /// Compare the master-equation root with a dense SVD, trial by trial.
    #[command(name = "oracle-check", after_help = EXIT_CODES)]
    OracleCheck(OracleArgs),
    /// Histogram of the singular values of one noise matrix against the
    /// limiting density.
    #[command(after_help = EXIT_CODES)]
    Density(DensityArgs),
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, conflicts_with_all = ["n", "k"])]
    pub phi: Option<f64>,
    #[arg(long, requires = "k")]
    pub n: Option<usize>,
    #[arg(long, requires = "n")]
    pub k: Option<usize>,
    #[arg(long, requires = "k", default_value_t = 1)]
    pub q: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long, conflicts_with_all = ["n", "m", "k", "lambda"])]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, conflicts_with = "k")]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    /// Grid of signal-to-noise ratios, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    pub plot: bool,
    /// Output directory (default: the config's output_path, else ".").
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace the noise by zero; the root is then exactly beta.
    #[arg(long)]
    pub zero_noise: bool,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] spiked_unfold::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Plot(#[from] svg::PlotError),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// How a command that ran to completion turned out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Failures,
    Indeterminate,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Ok => ExitCode::SUCCESS,
            Outcome::Failures => ExitCode::from(1),
            Outcome::Indeterminate => ExitCode::from(3),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Predict(a) => commands::predict(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::OracleCheck(a) => commands::oracle_check(&a),
        Command::Density(a) => commands::density(&a),
    };
    match result {
        Ok(outcome) => outcome.into(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
