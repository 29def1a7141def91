//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A linear-algebra operation failed (e.g. a covariance matrix could not
    /// be factorized even after jitter escalation).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An optimizer could not produce any feasible point.
    #[error("no feasible point found: {0}")]
    Infeasible(String),

    /// A black-box oracle or simulator failed during an optimization run.
    #[error("oracle failure: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
