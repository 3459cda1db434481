use thiserror::Error;

/// Errors raised by the library.
///
/// Domain errors reject parameters that violate a precondition; capacity
/// errors reject inputs that are valid but exceed a configured resource limit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base {0}: need q >= 2")]
    InvalidBase(u64),
    #[error("{0} is not a unit modulo {1}")]
    NotAUnit(u64, String),
    #[error("divisibility failure: {0}")]
    NotDivisible(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("incomplete stream: {0}")]
    Incomplete(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity(_))
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
