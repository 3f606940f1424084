use thiserror::Error;

/// Errors surfaced by the numeric core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular Jacobian: pivot {pivot:e} below threshold {threshold:e}")]
    SingularJacobian { pivot: f64, threshold: f64 },

    #[error("argument {re}{im:+}i lies on the branch cut (-inf, 0]")]
    BranchCut { re: f64, im: f64 },

    #[error("base function vanishes at z1 = {re}{im:+}i away from the origin")]
    ZeroOfBase { re: f64, im: f64 },

    #[error("range-membership test did not converge (indeterminate)")]
    NoConvergence,

    #[error("Newton inversion diverged: {0}")]
    NewtonDivergence(String),

    #[error("adaptive quadrature exceeded {max_depth} refinement levels")]
    QuadratureFailure { max_depth: usize },

    #[error("base function is not g-starlike: worst margin {worst_margin:e}")]
    NotGStarlike { worst_margin: f64 },

    #[error("point is not on the unit sphere: |norm - 1| = {deviation:e}")]
    NotBoundaryPoint { deviation: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("upper distortion bounds undefined: first distortion factor {f1} is not positive")]
    UpperBoundsUndefined { f1: f64 },

    #[error("flow state escaped the unit ball at t = {t}")]
    EscapedBall { t: f64 },

    #[error("map violates the sheared shape: {0}")]
    ShapeViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
