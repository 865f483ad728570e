use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sns", version, about = "Boundary-driven harmonic and heat-conduction chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run independent trajectories and record occupation statistics.
    Simulate(SimulateArgs),
    /// Draw configurations from the exact stationary law.
    SampleExact(SampleArgs),
    /// Run a suite of numerical identity checks.
    Verify(VerifyArgs),
    /// Test a simulation output directory against the exact law.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Defaults to $SNS_OUTPUT_DIR, then ./sns-out.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// discrete | continuous
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub beta_a: Option<f64>,
    #[arg(long)]
    pub beta_b: Option<f64>,
    #[arg(long)]
    pub t_a: Option<f64>,
    #[arg(long)]
    pub t_b: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Defaults to a tenth of t-max.
    #[arg(long)]
    pub burn_in: Option<f64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Small-jump cutoff of the continuous chain.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Blocks per trajectory for error estimation.
    #[arg(long)]
    pub blocks: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// identities | telescoping | stationarity | equilibrium | all
    #[arg(long)]
    pub suite: Option<String>,
    /// Chain sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub beta_a: Option<f64>,
    #[arg(long)]
    pub beta_b: Option<f64>,
    #[arg(long)]
    pub t_a: Option<f64>,
    #[arg(long)]
    pub t_b: Option<f64>,
    /// Truncation level of the direct stationarity check.
    #[arg(long)]
    pub k: Option<usize>,
    /// Overrides every per-check tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub mc_samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Directory written by `simulate`.
    pub input: Option<PathBuf>,
    /// Family significance level of the goodness-of-fit tests.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Largest accepted |z| for means and covariances.
    #[arg(long)]
    pub z_max: Option<f64>,
}
