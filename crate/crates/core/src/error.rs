use thiserror::Error;

/// Errors produced by state construction, measure evaluation and the numerical oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {0} is not a power of two of at least 4")]
    NotQubitDimension(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid separability class k={k} for {n} qubits")]
    InvalidClass { k: usize, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("verification failed: residual {residual:e} exceeds {tolerance:e}")]
    Verification { residual: f64, tolerance: f64 },

    #[error("see-saw did not converge after {iterations} iterations (best overlap² {best:.12})")]
    NotConverged { iterations: usize, best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
