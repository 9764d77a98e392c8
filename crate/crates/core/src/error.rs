use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty field")]
    EmptyField,

    #[error("field dimensions must be positive, got {0:?}")]
    ZeroDimension(Vec<usize>),

    #[error("max level {0} is out of range (supported: 0..={max})", max = crate::field::MAX_SUPPORTED_LEVEL)]
    MaxLevelOutOfRange(u32),

    #[error("value {value} at index {index} exceeds max level {max_level}")]
    LevelOutOfRange {
        index: usize,
        value: u32,
        max_level: u32,
    },

    #[error("expected {expected} values for the given dimensions, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{}: expected {expected} bytes, found {actual}", path.display())]
    SizeMismatch {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("unsupported BMP: {0}")]
    UnsupportedBmp(String),

    #[error("truncated BMP: need {expected} bytes of pixel data, file has {actual}")]
    TruncatedBmp { expected: u64, actual: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("weight table does not apply: {0}")]
    WeightMismatch(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code for this error: 2 for internal-consistency failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconsistent(_) => 2,
            _ => 1,
        }
    }
}
