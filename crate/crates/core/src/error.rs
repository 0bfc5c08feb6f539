use crate::metric::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for a space of {size} points")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("point kind does not match the space (expected {expected})")]
    KindMismatch { expected: &'static str },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("metric axiom violated: {0}")]
    MetricViolation(Violation),

    /// Structural problem in an instance, located by a JSON-style field path.
    #[error("{message} at {path}")]
    InvalidInstance { path: String, message: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Unsupported(String),

    #[error("{what}: {count} exceeds the cap of {cap}{hint}")]
    TooLarge {
        what: &'static str,
        count: String,
        cap: u64,
        hint: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInstance {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn too_large(what: &'static str, count: Option<u64>, cap: u64) -> Self {
        Error::TooLarge {
            what,
            count: count.map_or_else(|| "more than 2^64".to_string(), |c| c.to_string()),
            cap,
            hint: "",
        }
    }

    /// True for errors caused by asking for a strategy/space pairing no algorithm covers.
    pub fn is_unsupported(&self) -> bool {
        matches!(self, Error::Unsupported(_))
    }
}
