use thiserror::Error;

/// Errors raised by the geometry kernels and verification campaigns.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("submanifold dimension n = {0} is too small; n >= 2 required")]
    InvalidDimension(usize),

    #[error("point lies outside the function domain")]
    OutOfDomain,

    #[error("differentiation produced a non-finite result")]
    DifferentiationFailure,

    #[error("homogeneity check inconclusive: all {0} samples fell outside the domain")]
    Inconclusive(usize),

    #[error("domains of the composed functions do not intersect")]
    EmptyDomainIntersection,

    #[error("ray projection undefined: slice function value {value:.3e} at or below the floor")]
    ProjectionUndefined { value: f64 },

    #[error("point violates slice membership: cone residual {cone:.3e}, level residual {level:.3e}")]
    NotOnSlice { cone: f64, level: f64 },

    #[error("point is not on the null cone: residual {0:.3e}")]
    NotOnCone(f64),

    #[error("degenerate point: slice constraint covectors are linearly dependent")]
    DegeneratePoint,

    #[error("degenerate metric: Gram matrix exceeds the conditioning bound")]
    DegenerateMetric,

    #[error("vector is not tangent to the slice: residuals ({0:.3e}, {1:.3e})")]
    NotTangent(f64, f64),

    #[error("matrix is not eta-antisymmetric: max violation {0:.3e}")]
    NotAntisymmetric(f64),

    #[error("matrix fails the group invariants: isometry residual {isometry:.3e}, det {det}")]
    NotInGroup { isometry: f64, det: f64 },

    #[error("algebra element norm {0:.3e} exceeds the exponential bound")]
    ExponentialOverflow(f64),

    #[error("conformal boundary: slice function vanishes at the transformed point")]
    ConformalBoundary,

    #[error("sampling domain exhausted after {attempts} attempts on trial {trial}")]
    DomainExhausted { trial: u64, attempts: u64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("linear solve failed: singular system")]
    SingularSystem,

    #[error("chart coordinates lie outside the chart domain")]
    OutsideChart,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
