//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed text input; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("division by zero")]
    DivisionByZero,

    /// A caller violated an operation's precondition.
    #[error("{0}")]
    Precondition(String),

    /// A needed square root does not exist in Q(i); the offending value is
    /// reported verbatim instead of being approximated.
    #[error("square root of {value} does not exist in Q(i)")]
    SqrtNotInField { value: String },

    /// A consistency check that should be unreachable failed.
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
