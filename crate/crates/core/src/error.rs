use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NonSymmetricInput { asymmetry: f64 },
    #[error("matrices do not commute (max commutator entry {residual:e})")]
    NonCommutingInput { residual: f64 },
    #[error("matrix is not a symmetric unitary")]
    NotSymmetricUnitary,
    #[error("matrix is not in SO(4)")]
    NotSpecialOrthogonal,
    #[error("magic-basis image is not a tensor product (residual {residual:e})")]
    NotTensorSplittable { residual: f64 },
    #[error("diagonal is not a tensor product (invariant off by {deviation:e})")]
    NotTensorDecomposable { deviation: f64 },
    #[error("square-root product matches neither sign of the target determinant")]
    DetMismatch,
    #[error("diagonal entries must have unit modulus")]
    NotUnitModulus,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),
}

impl Error {
    /// Stable variant name, used by the CLI for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotUnitary { .. } => "NotUnitary",
            Error::NonSymmetricInput { .. } => "NonSymmetricInput",
            Error::NonCommutingInput { .. } => "NonCommutingInput",
            Error::NotSymmetricUnitary => "NotSymmetricUnitary",
            Error::NotSpecialOrthogonal => "NotSpecialOrthogonal",
            Error::NotTensorSplittable { .. } => "NotTensorSplittable",
            Error::NotTensorDecomposable { .. } => "NotTensorDecomposable",
            Error::DetMismatch => "DetMismatch",
            Error::NotUnitModulus => "NotUnitModulus",
            Error::InvalidTolerance(_) => "InvalidTolerance",
            Error::DecompositionFailed(_) => "DecompositionFailed",
        }
    }
}
