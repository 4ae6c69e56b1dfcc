use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("element is not in the expected subspace: {0}")]
    Membership(String),

    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("inconsistent system: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invariant(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant { name, detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
