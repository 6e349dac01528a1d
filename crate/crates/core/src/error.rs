use thiserror::Error;

use crate::margin::LossId;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The loss cannot be used by the requested operation.
    #[error("loss `{0}` is not supported here: {1}")]
    UnsupportedLoss(LossId, &'static str),

    /// An exact-risk computation could not be carried out.
    #[error("oracle error: {0}")]
    Oracle(String),

    /// A quadrature would overflow (e.g. exponential loss with huge margins).
    #[error("overflow guard: {0}")]
    Overflow(String),

    /// No tabulated quantity exists for the requested combination.
    #[error("not available: {0}")]
    NotAvailable(String),

    /// A simulation study could not produce a result.
    #[error("study error: {0}")]
    Study(String),

    /// Malformed model, dataset or config document.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
