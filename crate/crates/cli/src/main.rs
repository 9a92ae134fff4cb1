//! `arbk`: generate sparse test problems, run Bregman-Kaczmarz solvers, and
//! compare their convergence across seeded trials.
//!
//! Exit codes: 0 success, 2 invalid flags or malformed input, 3 I/O failure,
//! 4 degenerate generated target, 5 non-finite iterate.

mod commands;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use arbk::experiments::METRIC_NAMES;
use arbk::Method;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "arbk",
    version,
    about = "Randomized Bregman-Kaczmarz solvers and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a consistent Gaussian problem with a sparse reference solution.
    Generate(GenerateArgs),
    /// Run one solver on a problem file and log metrics per epoch.
    Solve(SolveArgs),
    /// Run several solvers over seeded trials and aggregate the curves.
    Compare(CompareArgs),
    /// Redraw a convergence chart from a CSV log.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = positive)]
    pub m: usize,
    #[arg(long, value_parser = positive)]
    pub n: usize,
    #[arg(long, value_parser = nonnegative)]
    pub lambda: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_parser = method)]
    pub method: Method,
    #[arg(long, value_parser = positive)]
    pub epochs: usize,
    #[arg(long)]
    pub seed: u64,
    /// Stop once the relative residual drops to this value.
    #[arg(long, default_value_t = 0.0, value_parser = nonnegative)]
    pub tol: f64,
    /// Initial momentum weight (default 1/m).
    #[arg(long, value_parser = theta)]
    pub theta0: Option<f64>,
    /// Per-epoch CSV log.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Problem file; every trial reuses it with a different row stream.
    #[arg(long, conflicts_with_all = ["m", "n", "lambda"])]
    pub problem: Option<PathBuf>,
    /// Generate a fresh problem per trial with these rows...
    #[arg(long, value_parser = positive)]
    pub m: Option<usize>,
    /// ...columns...
    #[arg(long, value_parser = positive)]
    pub n: Option<usize>,
    /// ...and sparsity weight.
    #[arg(long, value_parser = nonnegative)]
    pub lambda: Option<f64>,
    #[arg(long, value_delimiter = ',', value_parser = method, default_value = "bk,arbk")]
    pub methods: Vec<Method>,
    #[arg(long, value_parser = positive, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_parser = positive)]
    pub epochs: usize,
    /// Trial t uses seed `seed + t` for both the problem and the row stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0, value_parser = nonnegative)]
    pub tol: f64,
    #[arg(long, value_parser = theta)]
    pub theta0: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// A `solve` log or a `compare` table.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = METRIC_NAMES, default_value = "rel_residual")]
    pub metric: String,
    /// Legend label for single-run logs.
    #[arg(long, default_value = "run")]
    pub label: String,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        Ok(v) => Err(format!("must be finite and nonnegative, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn theta(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        Ok(v) => Err(format!("must lie in (0, 1], got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LOG_LEVEL", "error"))
        .target(env_logger::Target::Stderr)
        .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Plot(a) => commands::plot(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
