use thiserror::Error;

/// Errors raised by the numerical routines and the file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A distance or parameter fell outside the domain covered by a tabulated modulus.
    #[error("value {value} outside the range [0, {max}] covered by the modulus")]
    ModulusRange { value: f64, max: f64 },

    #[error("graph has {vertices} vertices, exhaustive search is capped at {limit}")]
    SizeLimit { vertices: usize, limit: usize },

    /// The contracted graph still contains a cycle; `cycle` lists class ids in order.
    #[error("quotient is not a tree: cycle through classes {cycle:?}")]
    NotATree { cycle: Vec<usize> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
