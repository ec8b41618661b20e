use std::io;

use thiserror::Error;

/// Errors raised by parsing, game construction and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("expected a {expected} node, got {found}")]
    OwnerMismatch {
        expected: crate::game::Owner,
        found: crate::game::Owner,
    },

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("antichain mixes scheduler and task nodes")]
    MixedOwners,

    #[error("state space has {size} nodes, above the cap of {cap}")]
    SpaceCapExceeded { size: u128, cap: u64 },

    #[error("budget exceeded after {explored} explored nodes ({reason})")]
    BudgetExceeded { explored: u64, reason: &'static str },

    #[error("no safe move at {0}")]
    NoSafeMove(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
