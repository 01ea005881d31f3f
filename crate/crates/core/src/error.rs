use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text, with the 1-based line number.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A parameter or input violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An iterative solver exhausted its budget. `residuals` holds the best
    /// relative residual seen for each requested pair.
    #[error("did not converge after {iterations} iterations (residuals {residuals:?})")]
    NotConverged {
        iterations: usize,
        residuals: Vec<f64>,
    },

    /// The requested number of singular vectors exceeds the numerical rank.
    #[error("rank deficient: s_{k} = {value:e} is below {threshold:e}")]
    RankDeficient { k: usize, value: f64, threshold: f64 },

    /// Inconsistent combination of options or flags.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("invalid file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn dimension<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
