use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("node index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("a gossip step needs two distinct nodes, got {0} twice")]
    SelfLoop(usize),

    #[error("chi is defined on (0, 1], got {0}")]
    ChiDomain(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid number literal `{0}`")]
    BadNumber(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node count must be at least {min}, got {n}")]
    TooFewNodes { n: usize, min: usize },

    #[error("{0} is a power of two; the parity certificate does not apply")]
    PowerOfTwo(usize),

    #[error("schedule product is not a consensus matrix")]
    NotConsensus,

    #[error("malformed density matrix: {0}")]
    MalformedState(String),

    #[error("qubit count {n} exceeds the supported maximum {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("search depth {0} exceeds the supported maximum of 62 steps")]
    DepthTooLarge(u64),

    #[error("prefix length {h} exceeds schedule length {len}")]
    PrefixTooLong { h: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
