use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("direction cosine {0} is outside [-1, 1]")]
    InvalidDirection(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("at least two channel soundings are required, got {0}")]
    InsufficientSoundings(usize),

    #[error("estimation failed: {0}")]
    EstimationFailure(&'static str),

    #[error("degenerate geometry: every sounding nulled the link")]
    DegenerateGeometry,

    #[error("degenerate scenario: {0}")]
    DegenerateScenario(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
