//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, validation, and the numerical lab.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad indices, empty rows, unknown generators, parse failures.
    #[error("validation: {0}")]
    Validation(String),

    /// A resource guard tripped: dimension cap or enumeration bound exceeded.
    #[error("feasibility: {0}")]
    Feasibility(String),

    /// A numerical hypothesis was violated beyond tolerance.
    #[error("numeric: {0}")]
    Numeric(String),

    /// Internal consistency failure: a closed-form size forecast disagreed
    /// with a measured pass output. Treated as a compiler bug, never a warning.
    #[error("size accounting: {0}")]
    SizeMismatch(String),

    /// I/O failure while reading or writing artifact files.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn feasibility(msg: impl Into<String>) -> Self {
        Error::Feasibility(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
