use thiserror::Error;

use crate::numerics::BasisTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M†| = {max_deviation:.3e}, tolerance {tolerance:.3e})")]
    NotHermitian { max_deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Kronecker product must be spin ⊗ boson, got {left:?} ⊗ {right:?}")]
    BasisOrderViolation { left: BasisTag, right: BasisTag },

    #[error("basis mismatch: expected {expected:?}, found {found:?}")]
    BasisMismatch { expected: BasisTag, found: BasisTag },

    #[error("Fock truncation n_max = {n_max} retains only {retained:.15} of the probability")]
    TruncationInsufficient { n_max: usize, retained: f64 },

    #[error("drive configuration violated: {0}")]
    ConfigurationViolation(String),

    #[error("sample time t = {t} lies inside a pulse without an aligned segment boundary")]
    StepTooCoarse { t: f64 },

    #[error("density matrix lost positivity at t = {t}: min eigenvalue {min_eigenvalue:.3e}")]
    PositivityViolation { t: f64, min_eigenvalue: f64 },

    #[error("density matrix invariant violated at t = {t}: {what}")]
    InvariantViolation { t: f64, what: String },

    #[error("sphere-map resolution {0} is below the minimum of 16 points per axis")]
    ResolutionTooLow(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// True for failures of a numerical invariant (trace, positivity, Hermiticity),
    /// as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::PositivityViolation { .. }
                | Error::InvariantViolation { .. }
        )
    }
}
