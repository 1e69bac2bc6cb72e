use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: i128, order: u128 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("moduli {a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid too coarse: resolution {got} but {required} required")]
    GridTooCoarse { required: u64, got: u64 },

    #[error("weight sequence is not admissible: {0}")]
    InadmissibleWeight(String),

    #[error("object too large to materialize: {0}")]
    TooLarge(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
