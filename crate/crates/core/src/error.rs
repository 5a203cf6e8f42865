//! Crate-wide error type.
//!
//! Invalid parameters are rejected eagerly at construction sites; simulation
//! code may assume its inputs were validated and panics only on internal
//! invariant violations.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside its documented domain.
    /// `what` names the offending parameter or config field.
    #[error("invalid parameter {what}: {why}")]
    InvalidParameter { what: String, why: String },

    /// A run violated a hard invariant of the dynamics. Indicates a bug,
    /// not bad input.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// Config or result (de)serialization failed.
    #[error("serialization: {0}")]
    Serialization(#[from] serde_json::Error),

    /// File I/O while reading configs or writing results.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(what: impl Into<String>, why: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what: what.into(),
            why: why.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
