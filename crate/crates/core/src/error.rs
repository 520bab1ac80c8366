use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
///
/// Mathematical verdicts (a failing witness, a norm axiom violation) are never
/// errors; they are reported through [`crate::report::WitnessReport`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed word: letter {letter} is not a valid letter for rank {rank}")]
    MalformedWord { letter: i32, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("{what} exceeds the configured cap of {cap}")]
    ResourceCap { what: &'static str, cap: usize },

    #[error("element sets belong to different groups")]
    GroupMismatch,

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
