use thiserror::Error;

/// Errors surfaced by the simulation and analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was called on inputs that violate its documented
    /// precondition (e.g. a Lyapunov evaluation on an asymmetric graph).
    #[error("precondition violation: {0}")]
    PreconditionViolation(String),

    #[error("numerical failure at t = {time}: {msg}")]
    NumericalFailure { time: f64, msg: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionViolation(msg.into())
    }
}
