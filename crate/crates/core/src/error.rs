use thiserror::Error;

/// Errors produced by the engine and its harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("events out of order: {0}")]
    Unordered(String),

    #[error("unknown intent id {0}")]
    UnknownIntent(u32),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("snapshot: bad magic header")]
    BadMagic,

    #[error("snapshot: unsupported format version {0}")]
    UnsupportedVersion(u16),

    #[error("snapshot: truncated stream")]
    Truncated,

    #[error("snapshot: {0}")]
    Corrupt(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn out_of_range(what: &'static str, value: impl ToString) -> Error {
    Error::OutOfRange {
        what,
        value: value.to_string(),
    }
}
