use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("gated: missing {0}")]
    Gated(&'static str),
    #[error("validity error: {0}")]
    Validity(String),
    #[error("precondition error: {0}")]
    Precondition(String),
    #[error("connectivity error: {0}")]
    Connectivity(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("inconsistent bounds: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate curve family: {0}")]
    DegenerateFamily(String),
    #[error("aliasing: {0}")]
    Aliasing(String),
    #[error("accuracy: {0}")]
    Accuracy(String),
    #[error("orientation: {0}")]
    Orientation(String),
    #[error("injectivity: {0}")]
    Injectivity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
