use thiserror::Error;

/// Errors raised by the simulator and its oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dense construction would exceed the supported size.
    #[error("resource limit: {what} requires m <= {limit}, got m = {got}")]
    ResourceLimit {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A state left the dual-rail code space where the operation requires it.
    #[error("code-space violation: {0}")]
    CodeSpace(String),

    #[error("internal consistency: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
