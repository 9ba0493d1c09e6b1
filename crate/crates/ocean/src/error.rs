use std::io;
use std::path::PathBuf;

/// Errors surfaced by ingestion, persistence and reporting.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ocean_core::Error),

    #[error("{path}: {error}")]
    Io { path: PathBuf, error: io::Error },

    #[error("{source_name}, line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Validation(String),

    #[error("sample identifiers do not match; only in first dataset: [{}], only in second: [{}]", only_a.join(", "), only_b.join(", "))]
    SampleMismatch {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },

    #[error("unknown feature set {0:?}")]
    UnknownSet(String),

    #[error("feature set {0:?} has no members present in the matrix")]
    UnmatchedSet(String),

    #[error("not a state file: {0}")]
    StateFormat(String),

    #[error("state file version {found} is not supported (expected {expected})")]
    StateVersion { found: u32, expected: u32 },

    #[error("state file failed checksum verification ({0}); the file is corrupt or truncated")]
    Checksum(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            error: source,
        }
    }

    /// Process exit code: 1 for invalid input, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
