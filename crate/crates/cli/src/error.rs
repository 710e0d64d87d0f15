use fockforce_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const SWEEP_FAILED: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: exit::INPUT, message: message.into() }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        Self::input(format!("{context}: {err}"))
    }
}

/// Human-readable description with a remediation hint where one exists.
pub fn describe(err: &CoreError) -> String {
    match err {
        CoreError::TruncationTooSmall { dim, required } => {
            format!("{err}; rerun with --dim {required} or larger (got {dim})")
        }
        CoreError::MemoryCapExceeded { .. } => format!("{err}; lower --dim or --N, or raise --memory-cap"),
        _ => err.to_string(),
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::NoRoot(_) | CoreError::NonConvergence { .. } => exit::SOLVER,
            _ => exit::INPUT,
        };
        Self { code, message: describe(&err) }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
