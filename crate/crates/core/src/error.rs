use thiserror::Error;

/// Errors raised by the quaternion algebra, calculus and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite component {0} in quaternion")]
    NonFinite(f64),
    #[error("rotator must be a nonzero quaternion")]
    ZeroRotator,
    #[error("division by the zero quaternion")]
    ZeroDivisor,
    #[error("shape mismatch: expected {expected}, got {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("empty vector or matrix")]
    Empty,
    #[error("complex matrix does not have quaternion adjoint block structure (deviation {0:e})")]
    NotAdjointStructured(f64),
    #[error("matrix is numerically singular (condition estimate {0:e})")]
    Singular(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("real Hessian bridge left an imaginary residue of {0:e}")]
    NotRealResult(f64),
    #[error(
        "supplied gradient disagrees with the finite-difference oracle (relative error {0:e})"
    )]
    GradientMismatch(f64),
    #[error("line restriction requires a nonzero direction")]
    ZeroDirection,
    #[error("matrix is not positive definite (min eigenvalue {0:e})")]
    NotPD(f64),
    #[error("constraint matrix is rank deficient (rank {rank}, rows {rows}, cols {cols})")]
    RankDeficient {
        rank: usize,
        rows: usize,
        cols: usize,
    },
    #[error("steering vector must be nonzero")]
    ZeroSteering,
    #[error("objective is not certified convex by the second-order criterion")]
    NotCertifiedConvex,
    #[error("descent diverged at iteration {0}")]
    Diverged(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err(expected: impl Into<String>, found: impl Into<String>) -> Error {
    Error::ShapeMismatch {
        expected: expected.into(),
        found: found.into(),
    }
}
