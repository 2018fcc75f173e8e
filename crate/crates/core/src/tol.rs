//! Pinned numerical tolerances and step sizes.
//!
//! Every threshold used in membership checks, domain gates, and campaign
//! verdicts lives here; no inline magic numbers in the kernels.

/// Cone membership: |C(y)| <= CONE_MEMBERSHIP * max(1, |y|_inf^2).
///
/// The quadratic scale factor tracks the degree-2 homogeneity of the cone
/// constraint, so membership survives ray rescaling.
pub const CONE_MEMBERSHIP: f64 = 1e-9;

/// Slice level membership: |h(y) - 1| <= LEVEL_MEMBERSHIP (absolute; the
/// level value is normalized to 1 by definition).
pub const LEVEL_MEMBERSHIP: f64 = 1e-9;

/// Input tangency gate, scaled by max(1, |y|_inf * |V|_inf). Looser than
/// arithmetic precision because user vectors may come from projections.
pub const TANGENT_INPUT: f64 = 1e-9;

/// Residual bound on tangent-basis output against both slice constraints.
pub const BASIS_RESIDUAL: f64 = 1e-10;

/// Floor on h(y) below which ray projection is refused.
pub const PROJECTION_FLOOR: f64 = 1e-12;

/// Positivity floor for deformed slice functions and the conformal
/// boundary: k(y) must exceed POSITIVITY_FLOOR * |y|_inf. Scaling by the
/// point norm keeps the gate invariant along rays (k is degree one).
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Half-width of the null classification band on the squared gradient norm
/// (the slice function is normalized to k(y_o) = 1 by slice membership).
pub const NULL_BAND: f64 = 1e-10;

/// Default residual tolerance for verification campaigns.
pub const CAMPAIGN_DEFAULT: f64 = 1e-9;

/// Central-difference step factor for the differential oracle:
/// step = FD_STEP_FACTOR * max(1, |y|_inf).
pub const FD_STEP_FACTOR: f64 = 6e-6;

/// Finite-difference step factor for curvature stencils:
/// step = CURVATURE_STEP_FACTOR * max(1, |x|_inf).
pub const CURVATURE_STEP_FACTOR: f64 = 1e-3;

/// Conditioning bound on the metric Gram matrix before curvature assembly.
pub const CONDITION_BOUND: f64 = 1e10;

/// Entrywise bound for eta-antisymmetry of algebra elements (integer-entry
/// generators satisfy it exactly).
pub const ETA_ANTISYMMETRY: f64 = 1e-12;

/// Entrywise bound on A^T eta A - eta for group elements.
pub const GROUP_ISOMETRY: f64 = 1e-10;

/// Bound on |det A - 1| for group elements.
pub const GROUP_DET: f64 = 1e-8;

/// Algebra elements with 1-norm above this bound are rejected before
/// exponentiation.
pub const EXP_NORM_BOUND: f64 = 50.0;

/// Step for the curve-transport oracle used to cross-check push-forwards.
pub const CURVE_TRANSPORT_STEP: f64 = 1e-5;

/// Rejection-sampling attempts allowed per campaign trial.
pub const REJECTION_CAP: u64 = 100;
