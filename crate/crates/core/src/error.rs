use std::path::PathBuf;

/// Errors raised by the simulator, model builders, optimizers and CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A register or matrix is too small or too large for the requested operation.
    #[error("size error: {0}")]
    Size(String),

    /// An argument violates a precondition (mismatched lengths, duplicate targets, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// A value failed validation (non-unitary gate, bad config entry, ...).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
