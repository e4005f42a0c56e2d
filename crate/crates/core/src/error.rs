use thiserror::Error;

/// Errors raised by the geometry, flow and dynamo routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate metric: smallest eigenvalue {min_eig:e} vs largest {max_eig:e}")]
    DegenerateMetric { min_eig: f64, max_eig: f64 },

    #[error("metric is not symmetric (asymmetry {0:e})")]
    AsymmetricMetric(f64),

    #[error("point {0:?} lies outside the metric domain")]
    OutsideDomain(Vec<f64>),

    #[error("finite-difference stencil leaves the domain at {0:?}")]
    StencilOutOfDomain(Vec<f64>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("tangent vectors span a degenerate plane (S = {0:e})")]
    DegeneratePlane(f64),

    #[error("torsion vanishes at s = {0}; its reciprocal is singular")]
    ZeroTorsion(f64),

    #[error("{0} velocity must be non-zero")]
    ZeroVelocity(&'static str),

    #[error("cross-section radius must be positive")]
    ZeroRadius,

    #[error("tan(theta) is singular at theta = {0}")]
    TangentSingularity(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("metric lost positive-definiteness at t = {t} (flow singularity)")]
    PositivityLoss { t: f64 },

    #[error("metric sample {0} is not diagonal")]
    NonDiagonal(usize),

    #[error("non-positive value in {0}")]
    NonPositive(&'static str),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("frame is not orthonormal (Gram deviation {0:e})")]
    NonOrthonormalFrame(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Errors caused by the numerics hitting a singularity, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMetric { .. }
                | Error::StencilOutOfDomain(_)
                | Error::DegeneratePlane(_)
                | Error::ZeroTorsion(_)
                | Error::TangentSingularity(_)
                | Error::PositivityLoss { .. }
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
