use thiserror::Error;

use crate::statespace::RegisterShape;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index register needs n >= 2, got {0}")]
    InvalidRegister(usize),

    #[error("register shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: RegisterShape, right: RegisterShape },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("state norm {0} exceeds 1")]
    NormTooLarge(f64),

    #[error("initial state must be a unit vector (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace {0} outside [0, 1]")]
    InvalidTrace(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("workspace qubit {target} does not exist ({available} available)")]
    MissingQubit { target: usize, available: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid unitary at step {step}: {reason}")]
    InvalidUnitary { step: usize, reason: String },

    #[error("answer set mismatch: {0}")]
    AnswerSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("witness {w:e} exceeds b_(t-1) = {b:e} at step {t}")]
    WitnessExceedsBudget { t: usize, w: f64, b: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
