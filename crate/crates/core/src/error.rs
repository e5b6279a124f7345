use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("timestamp `{text}`: invalid {field}: {reason}")]
    Timestamp {
        text: String,
        field: &'static str,
        reason: String,
    },

    #[error("second press precedes the first by {0} us")]
    Ordering(i64),

    #[error("{}: row {row}: {message}", path.display())]
    Manifest {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image {}: {message}", path.display())]
    Image { path: PathBuf, message: String },

    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no embedding for image `{0}`")]
    MissingEmbedding(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("solver did not converge after {iterations} iterations (KKT violation {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("pair `{0}` has no label")]
    Unlabeled(String),

    #[error("verdicts refer to different pairs: `{0}` vs `{1}`")]
    PairMismatch(String, String),

    #[error("model: {0}")]
    Model(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
