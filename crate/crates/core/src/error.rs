use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inputs that do not describe a valid network, ensemble or system.
    #[error("configuration error: {0}")]
    Config(String),
    /// A call whose arguments violate the operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),
    /// A computed result contradicts an invariant that must hold.
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// Exhaustive enumeration would exceed the configured size limit.
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
