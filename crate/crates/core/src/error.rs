use thiserror::Error;

/// Error type shared by all synread subsystems.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain (e.g. a negative
    /// probability or a non-positive resolution step).
    #[error("domain error: {0}")]
    Domain(String),

    /// A component was assembled or invoked with inconsistent settings.
    #[error("configuration error: {0}")]
    Config(String),

    /// A control value fell outside the anchored sweep range.
    #[error("range error: {0}")]
    Range(String),

    /// Input data did not match the expected dataset schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// An operation was called before its required setup (e.g. encoding
    /// before fitting normalization).
    #[error("state error: {0}")]
    State(String),

    /// A text input could not be parsed; carries the source and line.
    #[error("parse error at {source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    /// A network failed validation; the message lists every violation.
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
