//! Run configuration: `--config` JSON merged under command-line flags.

use std::path::{Path, PathBuf};

use fockforce_core::fock::DEFAULT_MEMORY_CAP;
use fockforce_core::metrology::EstimationConvention;
use serde::Deserialize;

use crate::args::{CommonArgs, ConventionArg, Format, SampleOnly, SweepOnly};
use crate::error::{CliError, CliResult};

/// Environment variable that replaces the directory of `--out`.
pub const OUT_DIR_ENV: &str = "FOCKFORCE_OUT_DIR";

const KNOWN_KEYS: &[&str] = &[
    "family",
    "alpha",
    "alpha_im",
    "r",
    "lambda",
    "N",
    "K",
    "nu",
    "eps",
    "dim",
    "tol",
    "seed",
    "shots",
    "format",
    "out",
    "memory_cap",
    "convention",
    "axis",
    "values",
    "start",
    "stop",
    "count",
    "parallel",
    "scheme",
    "theta",
    "y_min",
    "y_max",
    "step",
];

#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    #[serde(flatten)]
    common: CommonArgs,
    #[serde(flatten)]
    sweep: SweepOnly,
    #[serde(flatten)]
    sample: SampleOnly,
}

/// Everything a subcommand may read, after merging.
#[derive(Debug, Clone, Default)]
pub struct Merged {
    pub common: CommonArgs,
    pub sweep: SweepOnly,
    pub sample: SampleOnly,
}

macro_rules! fill {
    ($dst:expr, $src:expr, $($field:ident),+) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.take(); } )+
    };
}

fn load(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))?;
    let map = value
        .as_object()
        .ok_or_else(|| CliError::input(format!("config {}: expected a JSON object", path.display())))?;
    if let Some(bad) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(CliError::input(format!("config {}: unknown key `{bad}`", path.display())));
    }
    serde_json::from_value(value).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
}

/// Fills every flag left unset on the command line from `--config`.
pub fn merge(common: CommonArgs, sweep: SweepOnly, sample: SampleOnly) -> CliResult<Merged> {
    let mut m = Merged { common, sweep, sample };
    let Some(path) = m.common.config.clone() else {
        return Ok(m);
    };
    let mut file = load(&path)?;
    let (c, f) = (&mut m.common, &mut file.common);
    fill!(
        c, f, family, alpha, alpha_im, r, lambda, n, k, nu, eps, dim, tol, seed, shots, format, out, memory_cap,
        convention
    );
    let (s, f) = (&mut m.sweep, &mut file.sweep);
    fill!(s, f, axis, values, start, stop, count);
    s.parallel |= f.parallel;
    let (s, f) = (&mut m.sample, &mut file.sample);
    fill!(s, f, scheme, theta, y_min, y_max, step);
    s.parallel |= f.parallel;
    Ok(m)
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub output_format: Format,
    pub output_path: Option<PathBuf>,
    pub memory_cap: usize,
    pub convention: EstimationConvention,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> CliResult<Self> {
        Self::with_out_dir(args, std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
    }

    pub fn with_out_dir(args: &CommonArgs, out_dir: Option<PathBuf>) -> CliResult<Self> {
        if let Some(d) = args.dim {
            if d < 2 {
                return Err(CliError::input("--dim must be at least 2"));
            }
        }
        let tol = args.tol.unwrap_or(1e-6);
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(CliError::input("--tol must be positive"));
        }
        let output_path = match (&args.out, out_dir) {
            (Some(p), Some(dir)) => {
                Some(dir.join(p.file_name().ok_or_else(|| CliError::input("--out needs a file name"))?))
            }
            (p, _) => p.clone(),
        };
        Ok(Self {
            dim: args.dim,
            tol,
            seed: args.seed.unwrap_or(0),
            output_format: args.format.unwrap_or(Format::Csv),
            output_path,
            memory_cap: args.memory_cap.unwrap_or(DEFAULT_MEMORY_CAP),
            convention: match args.convention.unwrap_or(ConventionArg::Uncertainty) {
                ConventionArg::Uncertainty => EstimationConvention::UncertaintyRelation,
                ConventionArg::CramerRao => EstimationConvention::CramerRao,
            },
        })
    }
}
