use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("negative value {0} has no digit expansion")]
    NegativeValue(String),
    #[error("cannot parse scalar {input:?}: {reason}")]
    ParseScalar { input: String, reason: String },
    #[error("value is not in Z[1/{p}]: {detail}")]
    NotInRing { p: u64, detail: String },
    #[error("division by {0}, which is not a unit of Z[1/p]")]
    NotAUnit(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown builtin root datum {0:?}")]
    UnknownName(String),
    #[error("root system is not crystallographic: {0}")]
    NotCrystallographic(String),
    #[error("Weyl group closure exceeded cap {cap} and the datum could not be classified")]
    CapExceededWithoutClassification { cap: usize },
    #[error("reflection {index} does not have order two")]
    OrderNotTwo { index: usize },
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("operation requires p > 2 (got p = {0})")]
    UnsupportedPrime(u64),
    #[error("weight {0} is not strictly dominant")]
    NotStrictlyDominant(String),
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
}

pub type Result<T> = std::result::Result<T, Error>;
