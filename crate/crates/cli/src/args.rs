//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "fockforce", version, about = "Truncated Fock-space simulator for weak-force detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a probe state and report its norm, photon numbers and tail.
    State(StateArgs),
    /// Minimum detectable force of one probe configuration.
    Sensitivity(CommonArgs),
    /// Sensitivity over a one-parameter grid.
    Sweep(SweepArgs),
    /// Monte Carlo readout shots with an estimator summary.
    Sample(SampleArgs),
    /// Run the built-in invariant and acceptance checks.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionArg {
    /// `δθ = 1/√Var`.
    Uncertainty,
    /// `δθ = 1/(2√Var)`.
    #[value(name = "cramer_rao")]
    CramerRao,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    Parity,
    Homodyne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum AxisArg {
    #[value(name = "alpha")]
    #[serde(rename = "alpha")]
    Alpha,
    #[value(name = "r")]
    #[serde(rename = "r")]
    R,
    #[value(name = "lambda")]
    #[serde(rename = "lambda")]
    Lambda,
    #[value(name = "N")]
    #[serde(rename = "N")]
    N,
    #[value(name = "K")]
    #[serde(rename = "K")]
    K,
}

/// Flags shared by every subcommand. Each may also come from `--config`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
pub struct CommonArgs {
    /// JSON file supplying any flag; command-line flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// coherent | squeezed | tmsv | circle | even_cat | odd_cat | cat | gencat
    #[arg(long)]
    pub family: Option<String>,
    /// Coherent amplitude (real part for complex families).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Imaginary part of a complex coherent or cat amplitude.
    #[arg(long = "alpha-im", allow_hyphen_values = true)]
    #[serde(rename = "alpha_im")]
    pub alpha_im: Option<f64>,
    /// Squeezing parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Squeezing as `tanh r`.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Mode count of the entangled cat.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Modulus of the generalized cat.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Residue of the generalized cat.
    #[arg(long)]
    pub nu: Option<usize>,
    /// Weak-force displacement applied before homodyne sampling.
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Per-mode truncation (default: chosen from the family parameters).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Reporting tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest multi-mode tensor, in amplitudes.
    #[arg(long = "memory-cap")]
    #[serde(rename = "memory_cap")]
    pub memory_cap: Option<usize>,
    /// Estimation-bound convention for generator readout.
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Load a state document written by `state --format json`.
    #[arg(long)]
    pub from: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
pub struct SweepOnly {
    /// Parameter varied across the grid.
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    /// Explicit comma-separated grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Evaluate grid points on the thread pool.
    #[arg(long)]
    #[serde(default)]
    pub parallel: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub sweep: SweepOnly,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
pub struct SampleOnly {
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Rotation angle for parity readout.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long = "y-min", allow_hyphen_values = true)]
    #[serde(rename = "y_min")]
    pub y_min: Option<f64>,
    #[arg(long = "y-max", allow_hyphen_values = true)]
    #[serde(rename = "y_max")]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Generate shots on the thread pool.
    #[arg(long)]
    #[serde(default)]
    pub parallel: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub sample: SampleOnly,
}
