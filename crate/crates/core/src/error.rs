use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {n}-qubit Pauli operators (expected < {bound})")]
    PauliIndexOutOfRange { n: usize, index: u64, bound: u64 },

    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not a density matrix: {0}")]
    NotAState(String),

    #[error("operator is zero")]
    ZeroOperator,

    #[error("alpha = {alpha} outside the admissible range [{lo}, {hi}] for d = {d}")]
    AlphaOutOfRange { alpha: f64, lo: f64, hi: f64, d: usize },

    #[error("unsupported qubit count {n} for {what} (maximum {max})")]
    UnsupportedQubits { n: usize, max: usize, what: &'static str },

    #[error("missing RNG seed for {0}")]
    MissingSeed(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear program is infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("invalid orbit cache: {0}")]
    InvalidCache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
