use thiserror::Error;

/// Every failure the simulator can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("power series did not converge within {max_terms} terms")]
    NonConvergence { max_terms: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation dimension {dim} is too small; at least {required} is needed")]
    TruncationTooSmall { dim: usize, required: usize },

    #[error("state needs {amplitudes} amplitudes, above the cap of {cap}")]
    MemoryCapExceeded { amplitudes: usize, cap: usize },

    #[error("requested size {requested} exceeds the dense cap of {cap}")]
    DimensionCapExceeded { requested: usize, cap: usize },

    #[error("mode index {mode} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("state has vanishing norm")]
    VanishingNorm,

    #[error("generator variance {0:e} is degenerate")]
    DegenerateGenerator(f64),

    #[error("signal-to-noise ratio stays below one on the search interval (SNR at the upper end: {0})")]
    NoRoot(f64),

    #[error("coherent components are not resolvable (overlap scale {0:e})")]
    ComponentsNotResolvable(f64),

    #[error("pairwise scheme needs an even qubit count, got {0}")]
    OddPairCount(usize),

    #[error("homodyne grid misses {0:e} of the probability mass")]
    GridTooNarrow(f64),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
