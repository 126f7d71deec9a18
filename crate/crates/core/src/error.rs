use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("node limit of {limit} stored nodes exceeded")]
    NodeLimit { limit: usize },
    #[error("search cancelled")]
    Cancelled,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid solution path: {0}")]
    InvalidPath(String),
    #[error("schedule did not terminate within {0} steps")]
    StepLimit(u64),
}

impl SearchError {
    pub fn config(msg: impl Into<String>) -> Self {
        SearchError::Config(msg.into())
    }

    /// Resource exhaustion as opposed to a usage or logic error.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, SearchError::NodeLimit { .. } | SearchError::StepLimit(_))
    }
}
