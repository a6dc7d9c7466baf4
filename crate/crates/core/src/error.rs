use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("infeasible argument: {0}")]
    Infeasible(String),

    #[error("invalid restricted growth string: {0}")]
    InvalidPartition(String),

    #[error("invalid tuple: {0}")]
    InvalidTuple(String),

    #[error("alphabet of size {k} cannot label a partition with {blocks} blocks")]
    AlphabetTooSmall { k: usize, blocks: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("set must be nonempty")]
    EmptySet,

    #[error("subset is not contained in the permutation's domain")]
    NotASubset,

    #[error("wrong regime: {0}")]
    Regime(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("eigensolver failure: {0}")]
    Solver(String),
}
