use thiserror::Error;

/// Errors raised by the codec, the memory models and the cost model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed argument: wrong length, non-binary symbol, bad hex, ...
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Code/decoder parameters violate a structural constraint.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A behavioral model was driven out of order or broke a hardware rule
    /// (port budget, crossbar width, dead-region write, ...).
    #[error("protocol violation: {0}")]
    Protocol(String),
    /// Operation is not available in the current model mode.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A path memory was asked to hold more than `N` bits.
    #[error("path memory overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
