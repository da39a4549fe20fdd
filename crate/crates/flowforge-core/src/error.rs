use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter or argument lies outside the admissible range.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("subcriticality violated: {0}")]
    Subcritical(String),
    /// An enumeration or allocation bound was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("resolution too coarse: {0}")]
    Resolution(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("out of scope: {0}")]
    Scope(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            Error::Numeric(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
