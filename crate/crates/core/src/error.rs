use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an edge-list file could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input parsed but violates a graph invariant (duplicate edge, self-loop,
    /// inconsistent vertex label, ...).
    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("unknown layer id {0}")]
    UnknownLayer(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A vertex was not covered by any partition range.
    #[error("vertex {0} lies outside every partition range")]
    Routing(u32),

    /// An operation was handed input that breaks its precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
