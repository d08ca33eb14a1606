use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Every public fallible operation returns this type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is too large for an exhaustive or materialized computation.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Power iteration hit its iteration cap. The best estimate is kept.
    #[error("power iteration did not converge in {iterations} iterations (best estimate {estimate})")]
    NotConverged { estimate: f64, iterations: usize },

    /// An internal consistency check failed; indicates a bug rather than bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// A mechanism or experiment configuration cannot be satisfied.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
