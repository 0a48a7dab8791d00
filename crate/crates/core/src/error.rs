use thiserror::Error;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bracketing failed, reached [{lo:e}, {hi:e}]")]
    Range { lo: f64, hi: f64 },
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("accuracy failure: partial value {partial:e}, error estimate {error:e}")]
    AccuracyFailure { partial: f64, error: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("syntax error at offset {offset}: expected one of {expected:?}")]
    Syntax { offset: usize, expected: Vec<String> },
    #[error("function is not in the space: {0}")]
    NotInSpace(String),
}

pub type Result<T> = std::result::Result<T, Error>;
