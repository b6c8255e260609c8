use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("dialect violation: {}", .0.join("; "))]
    Dialect(Vec<String>),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("individual `{0}` is not interpreted")]
    Uninterpreted(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("cancelled")]
    Cancelled,
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
