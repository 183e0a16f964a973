use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmarkError {
    /// An argument lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Invalid configuration: a parameter violates a structural invariant.
    #[error("configuration error: {0}")]
    Config(String),
    /// A requested accuracy cannot be reached within the allowed work.
    #[error("precision error: {0}")]
    Precision(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// The sample points do not determine the fitted quantity.
    #[error("sampling error: {0}")]
    Sampling(String),
    /// A claimed algebraic condition (e.g. a vanishing determinant) does not hold numerically.
    #[error("inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, QmarkError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(QmarkError::Domain(msg.into()))
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(QmarkError::Config(msg.into()))
}
