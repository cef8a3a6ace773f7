use thiserror::Error;

/// Errors raised by the cube-hashing library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("coordinate {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("probability {0} out of range")]
    InvalidProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} exceeds limit {limit}")]
    TooLarge { what: String, limit: u64 },

    #[error("down-set exceeds budget {budget} (reached {reached} elements)")]
    BudgetExceeded { budget: usize, reached: usize },

    #[error("generator rows are linearly dependent")]
    DependentRows,

    #[error("set is not a right-shifted down-set")]
    NotRightShiftedDownSet,

    #[error("empty point set")]
    EmptySet,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
