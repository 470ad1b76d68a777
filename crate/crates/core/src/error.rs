use thiserror::Error;

/// Errors produced by the numerical kernels and the protocol layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state lies outside the attack domain (residual norm {0:.3e})")]
    OutsideAttackDomain(f64),

    #[error("distribution is not normalized (total {0})")]
    NotNormalized(f64),

    #[error("state has negative eigenvalue {0:.3e}")]
    NegativeEigenvalue(f64),

    #[error("stochastic map shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("simplex pivot limit exceeded")]
    PivotLimit,
}

pub type Result<T> = std::result::Result<T, Error>;
