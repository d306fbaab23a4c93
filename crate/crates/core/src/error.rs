//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input text (point files, polynomials, rationals, descriptors).
    #[error("parse error{}: {message}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    /// A precondition on the arguments does not hold.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An enumeration would exceed its configured cap.
    #[error("cap exceeded for {what}: need {required}, cap is {cap}")]
    CapExceeded { what: &'static str, required: u128, cap: u128 },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with [`Error::CapExceeded`] when `required > cap`.
pub(crate) fn check_cap(what: &'static str, required: u128, cap: u128) -> Result<()> {
    if required > cap {
        Err(Error::CapExceeded { what, required, cap })
    } else {
        Ok(())
    }
}
