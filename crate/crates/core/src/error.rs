use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group description: {0}")]
    InvalidGroup(String),
    #[error("nilpotency step {0} is not supported (maximum is 6)")]
    StepTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("coordinate {0} was declared central but does not commute with everything")]
    NotCentral(usize),
    #[error("point set has {got} points, at least {needed} required")]
    TooFewPoints { needed: usize, got: usize },
    #[error("window radius {window} too small, need at least {needed}")]
    WindowTooSmall { window: f64, needed: f64 },
    #[error("point set is not uniformly discrete")]
    NotSeparated,
    #[error("point set is not relatively dense inside its window")]
    NotRelativelyDense,
    #[error("{0} exceeds the sampled signal grid")]
    OutsideGrid(String),
    #[error("signals live on incompatible grids")]
    IncompatibleGrids,
    #[error("window function vanishes identically")]
    ZeroWindow,
    #[error("phase-space quadrature did not converge (relative change {0:.3e})")]
    NotConverged(f64),
    #[error("lower frame bound {lower:.3e} is below the regularization floor {floor:.3e}")]
    IllConditioned { lower: f64, floor: f64 },
    #[error("matrix is not idempotent (residual {0:.3e})")]
    NotIdempotent(f64),
    #[error("matrix is singular")]
    Singular,
    #[error("unsupported exponent p = {0}")]
    UnsupportedExponent(f64),
    #[error("eigensolver failed to converge")]
    Eigen,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
