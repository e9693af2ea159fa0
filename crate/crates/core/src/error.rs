use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible pair (k_i={k_i}, k_j={k_j}): raw connection probability {raw} outside [0, 1]")]
    InfeasiblePair { k_i: u32, k_j: u32, raw: f64 },

    #[error("kernel does not match sequence: {0}")]
    ParameterMismatch(String),

    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("no vertex has degree >= 2")]
    NoEligibleVertices,

    #[error("incompatible summaries: {0}")]
    IncompatibleSummaries(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
