use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical consistency error: {0}")]
    Consistency(String),
    #[error("accuracy target not reached: {what} (estimated error {estimate:.3e})")]
    Accuracy { what: String, estimate: f64 },
    #[error("truncation error: {what} (tail estimate {estimate:.3e})")]
    Truncation { what: String, estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
