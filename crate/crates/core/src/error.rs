use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the formula.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs that do not determine the requested object (coincident points, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("point lies outside the polygon")]
    Outside,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("group ball exceeded the element cap of {cap}")]
    SizeLimit { cap: usize },
    #[error("element is not in the ball")]
    NotInBall,
    /// A numerical counterexample to a statement that should hold.
    #[error("counterexample: {0}")]
    Counterexample(String),
    #[error("sampler error: {0}")]
    Sampler(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
