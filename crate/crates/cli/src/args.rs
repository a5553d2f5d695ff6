use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirichlet_roots::Part;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  I/O failure (for example an unwritable --out path)
  2  invalid flags or parameters
  3  deterministic quadrature budget exceeded (rerun with --method stratified)";

/// Expected real zeros of random Dirichlet polynomials.
///
/// Every command prints one JSON document to stdout; `--out` additionally
/// writes a CSV table.
#[derive(Debug, Parser)]
#[command(name = "dirichlet-roots", version, after_help = EXIT_CODES)]
pub struct Cli {
    /// Worker threads for quadrature panels and trials (0 = all cores).
    #[arg(
        long,
        global = true,
        env = "DIRICHLET_ROOTS_THREADS",
        default_value_t = 0
    )]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kac-Rice expected zero count on [T, 2T] with the asymptotic prediction.
    Expected(ExpectedArgs),
    /// Count zeros of simulated polynomials on [T, 2T].
    Simulate(SimulateArgs),
    /// Kac-Rice, asymptotics, simulation and the zeta comparison over several T.
    Compare(CompareArgs),
    /// Checks of the estimates behind the asymptotic expansion.
    Diagnostics(DiagnosticsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Cutoff: the sum runs over n <= floor(T).
    #[arg(long = "T")]
    pub cutoff: f64,
    /// Derivative order.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub k: i64,
    /// Exponent in the weights (log n)^k / n^sigma.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub sigma: f64,
    /// cosine or sine; defaults to cosine for even k and sine for odd k.
    #[arg(long)]
    pub part: Option<Part>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Deterministic,
    Stratified,
}

#[derive(Debug, Clone, Args)]
pub struct ExpectedArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum, default_value_t = Method::Deterministic)]
    pub method: Method,
    /// Strata for --method stratified.
    #[arg(long, default_value_t = 10_000)]
    pub strata: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV with a header and one row.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 400)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid step bound; defaults to one eighth of the mean zero spacing.
    #[arg(long)]
    pub step: Option<f64>,
    /// CSV of (trial_index, count).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Comma-separated cutoffs.
    #[arg(long = "T", value_delimiter = ',', default_values_t = [500.0, 1000.0, 2000.0])]
    pub cutoffs: Vec<f64>,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub k: i64,
    /// Trials per cutoff; 0 skips the simulation.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Strata used when a cutoff exceeds the deterministic budget.
    #[arg(long, default_value_t = 10_000)]
    pub strata: usize,
    /// CSV with columns T, ek, asym, mc_mean, mc_stderr, ratio.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Integrals of the pieces of w over [T, 2T] against their envelopes.
    Steps,
    /// Mean square of Dirichlet polynomials against the diagonal term.
    L2,
    /// Grid suprema of u_T(2t) and its derivatives.
    Sup,
    /// Simulated zero counts for a range of exponents sigma.
    Sigma,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnosticsArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long = "T", default_value_t = 1000.0)]
    pub cutoff: f64,
    /// Derivative order (steps and sup suites; steps supports only 0).
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub k: i64,
    /// Exponent (steps and sup suites; steps supports only 0.5).
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Grid size (sup suite).
    #[arg(long, default_value_t = 10_000)]
    pub gridpoints: usize,
    /// Trials per exponent (sigma suite).
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
