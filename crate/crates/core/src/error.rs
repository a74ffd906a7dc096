use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("non-finite coordinate in example {index}")]
    NonFinite { index: usize },

    #[error("empty supporting set")]
    EmptySupportingSet,

    #[error("oversized supporting set: {size} points in dimension {dim}")]
    OversizedSupportingSet { size: usize, dim: usize },

    #[error("degenerate halfspace: zero normal")]
    ZeroNormal,

    #[error("target intersects region")]
    TargetIntersectsRegion,

    #[error("region already empty")]
    RegionAlreadyEmpty,

    #[error("no witness of size <= {dim} found")]
    NoWitness { dim: usize },

    #[error("class too large ({size} hypotheses, budget {budget}); reduce pool_cap")]
    ClassTooLarge { size: u128, budget: u128 },

    #[error("invalid privacy parameter epsilon = {0}")]
    InvalidEpsilon(f64),

    #[error("illegal neighbor: public entry {0}")]
    IllegalNeighbor(usize),

    #[error("index {index} out of range for dataset of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
