//! Numerical differential geometry of conformally flat Lorentzian
//! manifolds realized as slices of the null cone in signature-(2,n) flat
//! space.
//!
//! The crate builds n-dimensional slices X_h (cone intersect {h = 1}) of
//! the (n+2)-dimensional ambient space, deforms them through degree-zero
//! rescalings (de Sitter into FLRW-type spaces), realizes the SO(2,n)
//! action as conformal transformations of the slices, and verifies the
//! metric relations behind all of this with seeded residual campaigns.

pub mod ambient;
pub mod cli;
pub mod curvature;
pub mod dual;
pub mod embedding;
pub mod error;
pub mod flrw;
pub mod group;
pub mod homogeneous;
pub mod report;
pub mod rng;
pub mod slice;
pub mod tol;

pub use ambient::{dilation_at, AmbientCovector, AmbientVector, Signature};
pub use curvature::{curvature_grid, scalar_curvature};
pub use dual::Dual;
pub use embedding::{deformation_campaign, isometry_gram_residual, Deformation};
pub use error::{Error, Result};
pub use flrw::{
    build_flrw, osculating_slice, standard_slice, FlrwSpace, OsculatingResult, ScaleFactor,
    ScaleFactorSpec, SliceClass, SliceKind, StandardSlice,
};
pub use group::{
    algebra_basis, conformal_campaign, conformal_factor_residual, exponential,
    random_algebra_element, AlgebraElement, GroupElement,
};
pub use homogeneous::{
    check_homogeneity, deformed, euler_residual, extend_scale_factor, DomainPredicate,
    HomogeneousFn,
};
pub use report::VerificationReport;
pub use slice::{
    check_tangent, ds_graph_chart, induced_metric, minkowski_null_chart, ray_project,
    slice_residuals, tangent_basis, MetricSample, SliceChart, SlicePoint,
};
