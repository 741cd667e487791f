use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid subsystem index set {0}")]
    InvalidSubsystems(String),

    #[error("{name} out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("channel is not trace preserving (defect {0:.3e})")]
    NotTracePreserving(f64),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("feedback protocol mismatch: {0}")]
    ProtocolMismatch(String),

    #[error("ensemble probabilities sum to {0}, expected 1")]
    BadEnsemble(f64),

    #[error("problem size exceeds the supported guard: {0}")]
    SizeGuard(String),

    #[error("{0}")]
    Invalid(String),
}
