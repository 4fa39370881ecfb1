use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input (coordinates out of range, non-partition parts, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A configured resource cap would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// Numerical failure: non-convergence, ill-conditioning.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
