//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("Pauli index {0} out of range 1..=3")]
    PauliIndex(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not a rotation (R^T R != I or det != 1)")]
    NotARotation,

    #[error("rotation generators do not satisfy their commutation relations: {0}")]
    BadRotationGenerators(String),

    #[error("boost generator is not nilpotent; exact exponential would not terminate")]
    NonNilpotentBoost,

    #[error("spinor dimension {0} is not supported (expected 1, 2 or 4)")]
    UnsupportedNcomp(usize),

    #[error("mass must be a positive rational, got {0}")]
    BadMass(String),

    #[error("operator order {0} not supported here: {1}")]
    UnsupportedOrder(usize, String),

    #[error("lower-component equation is not solvable: {0}")]
    NotSolvableForLower(String),

    #[error("boost representation calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
