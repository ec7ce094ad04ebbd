use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("drift matrix is not strictly stable")]
    Unstable,

    #[error("diffusion entry {index} is degenerate ({value:e})")]
    DegenerateDiffusion { index: usize, value: f64 },

    #[error("non-positive determinant {0:e}")]
    NonPositiveDeterminant(f64),

    #[error("symplectic eigenvalue is complex (discriminant {0:e})")]
    ComplexSymplecticEigenvalue(f64),

    #[error("mean-field equations have no non-negative photon-number root")]
    NoPhysicalRoot,

    #[error("mean-field branch {0} is not stable")]
    UnstableBranch(usize),

    #[error("covariance integration diverged at t = {0}")]
    Diverged(f64),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
