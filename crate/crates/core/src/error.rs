//! Crate-wide error type.

/// Errors produced by the solver and its command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation
    /// (negative momentum magnitude, alpha outside its ring range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed (non-finite intermediate, bracket that
    /// would not close, time step underflow).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Inconsistent or invalid configuration of a run or of a table build.
    #[error("configuration error: {0}")]
    Config(String),

    /// Configuration text failed validation; every violation is listed.
    #[error("invalid configuration:\n  {}", violations.join("\n  "))]
    InvalidConfig { violations: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
