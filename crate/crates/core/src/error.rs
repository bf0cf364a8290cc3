use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Paired axes or operands whose extents do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An operation that needs a matrix (or some other fixed rank) got something else.
    #[error("expected a rank-{expected} tensor, got rank {actual}")]
    Rank { expected: usize, actual: usize },

    /// A decomposition failed to converge or produced non-finite values.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A dense representation would exceed the configured qubit cap.
    #[error("capacity exceeded: {requested} qubits requested, limit is {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("gate '{label}' is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { label: String, deviation: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported feature at line {line}: {feature}")]
    Unsupported { line: usize, feature: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
