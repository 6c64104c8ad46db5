use thiserror::Error;

/// Errors raised by chain, fiber and monodromy operations.
///
/// Validation routines (`validate_fiber`, `validate_monodromy`,
/// `check_bounds`) do not use this type; they return reports that list
/// every violation instead of stopping at the first.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid valency ({m},{lambda},{sigma}): {reason}")]
    InvalidValency {
        m: u64,
        lambda: u64,
        sigma: u64,
        reason: String,
    },

    #[error("invalid chain sequence {0:?}: {1}")]
    InvalidChain(Vec<u64>, String),

    #[error("no chain matches the given valencies and screw number within the search caps")]
    ChainNotFound,

    #[error("chain search is ambiguous within the caps: found {0:?} and {1:?}")]
    ChainAmbiguous(Vec<u64>, Vec<u64>),

    #[error("invalid fiber graph: {0}")]
    InvalidFiber(String),

    #[error("invalid monodromy data: {0}")]
    InvalidMonodromy(String),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
