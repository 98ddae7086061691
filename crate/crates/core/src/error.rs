use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("point is not a fixed point of the operator (residual {residual:e}, tolerance {tolerance:e})")]
    NotFixedPoint { residual: f64, tolerance: f64 },

    #[error("{0}")]
    MissingData(String),

    #[error("trajectory length mismatch: {left} vs {right} aligned iterates")]
    LengthMismatch { left: usize, right: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
