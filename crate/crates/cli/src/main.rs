use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod grid;

use config::ModeConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files; exit code 2.
    Invalid(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl From<hsl_core::Error> for CliError {
    fn from(e: hsl_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// What a successful command reports back to `main`.
pub enum Verdict {
    Pass,
    /// At least one check failed; exit code 1.
    Fail,
}

#[derive(Parser)]
#[command(
    name = "hsl",
    version,
    about = "Hybrid classical/quantum search: simulation and lower-bound checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Fresh,
    Coherent,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file (or directory for `run`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one scenario and write its progress trace and summary.
    Run(RunArgs),
    /// Check every per-step claim and final bound on seeded random algorithms.
    Verify(VerifyArgs),
    /// Baseline success against the hybrid bound over a parameter grid.
    Sweep(SweepArgs),
    /// Search symmetric algorithm families for the best success probability.
    Optimize(OptimizeArgs),
    /// Aggregate a JSON output of `verify` or `sweep`.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tau_c: Option<usize>,
    #[arg(long)]
    pub tau_q: Option<usize>,
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// grover, pc-grover, classical or hybrid.
    #[arg(long)]
    pub baseline: Option<String>,
    #[arg(long, value_enum)]
    pub oracle_mode: Option<ModeConfig>,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Verify this scenario instead of random algorithms.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8])]
    pub n: Vec<usize>,
    /// Largest schedule length of a random algorithm.
    #[arg(long, default_value_t = 5)]
    pub tau_max: usize,
    /// Random algorithms per value of n.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial workspace qubits of random algorithms.
    #[arg(long, default_value_t = 1)]
    pub l0: usize,
    /// Also check detection bounds with the any-workspace-qubit-set answer.
    #[arg(long)]
    pub detection: bool,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Values as `a..b` (inclusive), `a,b,c` or `a`.
    #[arg(long, default_value = "16")]
    pub n: String,
    #[arg(long, default_value = "0")]
    pub tau_c: String,
    #[arg(long, default_value = "0")]
    pub tau_q: String,
    #[arg(long, default_value = "hybrid")]
    pub baseline: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeConfig::Classical)]
    pub oracle_mode: ModeConfig,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub tau_c: usize,
    #[arg(long, default_value_t = 0)]
    pub tau_q: usize,
    /// Overrides `--tau-c`/`--tau-q`; quantum steps must target qubit 0.
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Fresh)]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = hsl_core::optimizer::DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct ReportArgs {
    /// JSON written by `verify --format json` or `sweep --format json`.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

/// Applies `HSL_THREADS` to the global rayon pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HSL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Invalid(format!("HSL_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Run(a) => commands::run(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Optimize(a) => commands::optimize(&a),
        Command::Report(a) => commands::report(&a),
    });
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
