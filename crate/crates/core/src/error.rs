use thiserror::Error;

/// Errors surfaced by the library. The CLI and the C ABI map each variant
/// onto a stable exit/status code via [`Error::code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric guard: {0}")]
    Numeric(String),
}

impl Error {
    pub fn code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Domain(_) => 3,
            Error::Numeric(_) => 4,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
