use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u64, n: usize },

    #[error("triple ({0}, {1}, {2}) does not consist of distinct vertices")]
    NonDistinctTriple(u32, u32, u32),

    #[error("bipartite graph has an empty side")]
    EmptySide,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("input too large for exhaustive mode: {0}")]
    TooLarge(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integer overflow in exact arithmetic: {0}")]
    Overflow(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
