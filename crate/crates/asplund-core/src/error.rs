//! Error type shared by the whole crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by image construction, LIP arithmetic, map computation
/// and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands disagree on dimensions or grey scale.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A value lies outside the domain an operation requires.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates its contract (rank out of range, bad tolerance, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Probe extraction touched a pixel it must not use.
    #[error("probe extraction error: {0}")]
    Extraction(String),

    /// Scene synthesis could not place a pattern.
    #[error("scene generation error: {0}")]
    Generation(String),

    /// The reference bisection oracle could not bracket a bound.
    #[error("oracle failure: {0}")]
    Oracle(String),

    /// A file could not be decoded; `offset` is the byte position of the problem.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
