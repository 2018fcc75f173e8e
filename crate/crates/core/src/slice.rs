//! Cone slices X_h: membership, ray projection, tangent spaces, induced
//! metrics, and concrete charts for the de Sitter and flat null slices.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::ambient::{AmbientVector, Signature};
use crate::error::{Error, Result};
use crate::homogeneous::HomogeneousFn;
use crate::report::{fmt_f64, fmt_f64_array};
use crate::tol;

/// A validated point of the slice X_h = {C(y) = 0} intersect {h(y) = 1}.
#[derive(Clone)]
pub struct SlicePoint {
    y: AmbientVector,
    h: HomogeneousFn,
}

impl SlicePoint {
    /// Validates both membership residuals; the cone tolerance scales with
    /// the squared sup-norm (degree-two constraint), the level tolerance is
    /// absolute (the level is normalized to one).
    pub fn new(y: AmbientVector, h: HomogeneousFn) -> Result<Self> {
        let (cone, level) = slice_residuals(&y, &h)?;
        let cone_scale = y.norm_inf().powi(2).max(1.0);
        if cone.abs() > tol::CONE_MEMBERSHIP * cone_scale || level.abs() > tol::LEVEL_MEMBERSHIP {
            return Err(Error::NotOnSlice { cone, level });
        }
        Ok(Self { y, h })
    }

    pub fn point(&self) -> &AmbientVector {
        &self.y
    }

    pub fn slice_fn(&self) -> &HomogeneousFn {
        &self.h
    }

    pub fn sig(&self) -> Signature {
        self.h.sig()
    }
}

/// Raw membership residuals (C(y), h(y) - 1).
pub fn slice_residuals(y: &AmbientVector, h: &HomogeneousFn) -> Result<(f64, f64)> {
    let cone = h.sig().cone_constraint(y)?;
    let level = h.eval(y)? - 1.0;
    Ok((cone, level))
}

/// Project a cone point onto X_h along its ray: y -> y / h(y).
pub fn ray_project(y: &AmbientVector, h: &HomogeneousFn) -> Result<SlicePoint> {
    let cone = h.sig().cone_constraint(y)?;
    if cone.abs() > tol::CONE_MEMBERSHIP * y.norm_inf().powi(2).max(1.0) {
        return Err(Error::NotOnCone(cone));
    }
    let value = h.eval(y)?;
    if value <= tol::PROJECTION_FLOOR {
        return Err(Error::ProjectionUndefined { value });
    }
    SlicePoint::new(y.scale(1.0 / value), h.clone())
}

/// Check that `v` is tangent to the slice at `p`: annihilated by both the
/// cone constraint covector eta(y, .) and the level differential dh_y, up
/// to the scaled input tolerance.
pub fn check_tangent(p: &SlicePoint, v: &AmbientVector) -> Result<()> {
    let sig = p.sig();
    let cone_pairing = sig.inner(p.point(), v)?;
    let level_pairing = p.h.differential(p.point())?.apply(v)?;
    let scale = (p.point().norm_inf() * v.norm_inf()).max(1.0);
    if cone_pairing.abs() > tol::TANGENT_INPUT * scale
        || level_pairing.abs() > tol::TANGENT_INPUT * scale
    {
        return Err(Error::NotTangent(cone_pairing, level_pairing));
    }
    Ok(())
}

/// Euclidean-orthonormal basis of the tangent space
/// {V : eta(y, V) = 0 and dh_y(V) = 0} at a slice point.
///
/// Orthonormalization uses the auxiliary Euclidean metric: eta-normalization
/// fails on null directions, while Euclidean conditioning is always safe.
pub fn tangent_basis(p: &SlicePoint) -> Result<Vec<AmbientVector>> {
    let sig = p.sig();
    let dim = sig.dim();
    let row1 = sig.lower(p.point())?.components().to_vec();
    let row2 = p.h.differential(p.point())?.components().to_vec();

    let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let n1 = norm(&row1);
    if n1 <= 1e-300 {
        return Err(Error::DegeneratePoint);
    }
    let u1: Vec<f64> = row1.iter().map(|c| c / n1).collect();
    let proj = dot(&u1, &row2);
    let mut r2: Vec<f64> = row2.iter().zip(&u1).map(|(c, u)| c - proj * u).collect();
    let n2 = norm(&r2);
    if n2 <= 1e-12 * norm(&row2).max(1.0) {
        return Err(Error::DegeneratePoint);
    }
    for c in &mut r2 {
        *c /= n2;
    }
    let u2 = r2;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(sig.n());
    for j in 0..dim {
        if basis.len() == sig.n() {
            break;
        }
        let mut v: Vec<f64> = vec![0.0; dim];
        v[j] = 1.0;
        // Two orthogonalization sweeps against the constraints and the
        // accepted basis keep the result orthonormal to machine precision.
        for _ in 0..2 {
            let p1 = dot(&u1, &v);
            let p2 = dot(&u2, &v);
            for i in 0..dim {
                v[i] -= p1 * u1[i] + p2 * u2[i];
            }
            for b in &basis {
                let pb = dot(b, &v);
                for i in 0..dim {
                    v[i] -= pb * b[i];
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            for c in &mut v {
                *c /= nv;
            }
            basis.push(v);
        }
    }
    if basis.len() != sig.n() {
        return Err(Error::DegeneratePoint);
    }

    let vectors: Vec<AmbientVector> = basis
        .into_iter()
        .map(AmbientVector::new)
        .collect::<Result<_>>()?;
    let scale = p.point().norm_inf().max(1.0);
    for v in &vectors {
        let c1 = sig.inner(p.point(), v)?;
        let c2 = p.h.differential(p.point())?.apply(v)?;
        if c1.abs() > tol::BASIS_RESIDUAL * scale || c2.abs() > tol::BASIS_RESIDUAL * scale {
            return Err(Error::DegeneratePoint);
        }
    }
    Ok(vectors)
}

/// Gram matrix of a tangent basis under the ambient metric, tagged with the
/// chart coordinates it was sampled at (empty when sampled point-wise).
#[derive(Debug, Clone)]
pub struct MetricSample {
    x: Vec<f64>,
    g: DMatrix<f64>,
}

impl MetricSample {
    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn with_coords(mut self, x: Vec<f64>) -> Self {
        self.x = x;
        self
    }

    /// Count of (positive, negative) eigenvalues; a Lorentzian sample has
    /// signature (1, n-1).
    pub fn signature_counts(&self) -> (usize, usize) {
        let eig = SymmetricEigen::new(self.g.clone());
        let pos = eig.eigenvalues.iter().filter(|&&v| v > 0.0).count();
        let neg = eig.eigenvalues.iter().filter(|&&v| v < 0.0).count();
        (pos, neg)
    }

    pub fn to_json(&self) -> String {
        let mut rows = String::from("[");
        for i in 0..self.g.nrows() {
            if i > 0 {
                rows.push(',');
            }
            let row: Vec<f64> = (0..self.g.ncols()).map(|j| self.g[(i, j)]).collect();
            rows.push_str(&fmt_f64_array(&row));
        }
        rows.push(']');
        format!("{{\"x\":{},\"G\":{}}}", fmt_f64_array(&self.x), rows)
    }

    /// Chart coordinates followed by the upper-triangular Gram entries in
    /// row-major order.
    pub fn to_csv_row(&self) -> String {
        let mut fields: Vec<String> = self.x.iter().map(|v| fmt_f64(*v)).collect();
        for i in 0..self.g.nrows() {
            for j in i..self.g.ncols() {
                fields.push(fmt_f64(self.g[(i, j)]));
            }
        }
        fields.join(",")
    }
}

/// Induced metric: the Gram matrix G_ij = eta(V_i, V_j) of a tangent basis.
pub fn induced_metric(p: &SlicePoint, basis: &[AmbientVector]) -> Result<MetricSample> {
    let sig = p.sig();
    for v in basis {
        check_tangent(p, v)?;
    }
    let m = basis.len();
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let value = sig.inner(&basis[i], &basis[j])?;
            g[(i, j)] = value;
            g[(j, i)] = value;
        }
    }
    Ok(MetricSample { x: Vec::new(), g })
}

pub type PointMapFn = Arc<dyn Fn(&[f64]) -> Result<AmbientVector> + Send + Sync>;
pub type TangentMapFn = Arc<dyn Fn(&[f64], usize) -> Result<AmbientVector> + Send + Sync>;
pub type ChartDomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Local parametrization of a cone slice: chart coordinates x in R^n to
/// slice points, with the coordinate tangent frame.
#[derive(Clone)]
pub struct SliceChart {
    h: HomogeneousFn,
    point_map: PointMapFn,
    tangent_map: TangentMapFn,
    domain: ChartDomainFn,
}

impl SliceChart {
    pub fn from_closures(
        h: HomogeneousFn,
        point_map: PointMapFn,
        tangent_map: TangentMapFn,
        domain: ChartDomainFn,
    ) -> Self {
        Self {
            h,
            point_map,
            tangent_map,
            domain,
        }
    }

    pub fn dim(&self) -> usize {
        self.h.sig().n()
    }

    pub fn sig(&self) -> Signature {
        self.h.sig()
    }

    pub fn slice_fn(&self) -> &HomogeneousFn {
        &self.h
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && (self.domain)(x)
    }

    fn check_coords(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !(self.domain)(x) {
            return Err(Error::OutsideChart);
        }
        Ok(())
    }

    /// Ambient image of the chart coordinates, without slice validation.
    pub fn point_raw(&self, x: &[f64]) -> Result<AmbientVector> {
        self.check_coords(x)?;
        (self.point_map)(x)
    }

    /// Validated slice point at the chart coordinates.
    pub fn point(&self, x: &[f64]) -> Result<SlicePoint> {
        let y = self.point_raw(x)?;
        SlicePoint::new(y, self.h.clone())
    }

    /// Coordinate tangent vector d(point)/dx^i.
    pub fn tangent(&self, x: &[f64], i: usize) -> Result<AmbientVector> {
        self.check_coords(x)?;
        if i >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: i,
            });
        }
        (self.tangent_map)(x, i)
    }

    /// The full coordinate frame at x.
    pub fn frame(&self, x: &[f64]) -> Result<Vec<AmbientVector>> {
        (0..self.dim()).map(|i| self.tangent(x, i)).collect()
    }

    /// Gram matrix of the coordinate frame; the chart's metric components.
    pub fn gram(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let frame = self.frame(x)?;
        let sig = self.sig();
        let m = frame.len();
        let mut g = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let value = sig.inner(&frame[i], &frame[j])?;
                g[(i, j)] = value;
                g[(j, i)] = value;
            }
        }
        Ok(g)
    }

    /// Metric sample at x, carrying the chart coordinates.
    pub fn metric_sample(&self, x: &[f64]) -> Result<MetricSample> {
        let g = self.gram(x)?;
        Ok(MetricSample { x: x.to_vec(), g })
    }
}

fn lightcone_quadratic(x: &[f64]) -> f64 {
    let mut q = x[0] * x[0];
    for xi in &x[1..] {
        q -= xi * xi;
    }
    q
}

fn lightcone_quadratic_grad(x: &[f64], i: usize) -> f64 {
    if i == 0 {
        2.0 * x[0]
    } else {
        -2.0 * x[i]
    }
}

/// Graph chart of the de Sitter slice f(y) = H y^{n+1} = 1: the first n
/// ambient coordinates are the chart coordinates and
/// y^n = s sqrt(q(x) + H^-2) with q(x) = (x^0)^2 - sum_i (x^i)^2.
/// `branch` selects the sheet (+1 or -1).
pub fn ds_graph_chart(n: usize, hubble: f64, branch: f64) -> Result<SliceChart> {
    let sig = Signature::new(n)?;
    if hubble.is_nan() || hubble <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "curvature scale must be positive, got {hubble}"
        )));
    }
    if branch != 1.0 && branch != -1.0 {
        return Err(Error::InvalidSpec(format!(
            "branch sign must be +1 or -1, got {branch}"
        )));
    }
    let dim = sig.dim();
    let mut df = vec![0.0; dim];
    df[dim - 1] = hubble;
    let f = HomogeneousFn::linear_form(sig, crate::ambient::AmbientCovector::new(df)?)?;

    let inv_h2 = 1.0 / (hubble * hubble);
    let point_map: PointMapFn = Arc::new(move |x: &[f64]| {
        let w2 = lightcone_quadratic(x) + inv_h2;
        if w2 <= 0.0 {
            return Err(Error::OutsideChart);
        }
        let mut coords = Vec::with_capacity(x.len() + 2);
        coords.extend_from_slice(x);
        coords.push(branch * w2.sqrt());
        coords.push(1.0 / hubble);
        AmbientVector::new(coords)
    });
    let tangent_map: TangentMapFn = Arc::new(move |x: &[f64], i: usize| {
        let w2 = lightcone_quadratic(x) + inv_h2;
        if w2 <= 0.0 {
            return Err(Error::OutsideChart);
        }
        let mut coords = vec![0.0; x.len() + 2];
        coords[i] = 1.0;
        coords[x.len()] = branch * lightcone_quadratic_grad(x, i) / (2.0 * w2.sqrt());
        AmbientVector::new(coords)
    });
    let domain: ChartDomainFn =
        Arc::new(move |x: &[f64]| lightcone_quadratic(x) + inv_h2 > 0.0);
    Ok(SliceChart::from_closures(f, point_map, tangent_map, domain))
}

/// Global chart of the flat null slice f(y) = H (y^n + y^{n+1}) / 2 = 1:
/// y^n and y^{n+1} are 1/H +- (H/4) q(x). The induced metric in these
/// coordinates is the flat Minkowski matrix at every x.
pub fn minkowski_null_chart(n: usize, hubble: f64) -> Result<SliceChart> {
    let sig = Signature::new(n)?;
    if hubble.is_nan() || hubble <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "curvature scale must be positive, got {hubble}"
        )));
    }
    let dim = sig.dim();
    let mut df = vec![0.0; dim];
    df[dim - 2] = hubble / 2.0;
    df[dim - 1] = hubble / 2.0;
    let f = HomogeneousFn::linear_form(sig, crate::ambient::AmbientCovector::new(df)?)?;

    let point_map: PointMapFn = Arc::new(move |x: &[f64]| {
        let q = lightcone_quadratic(x);
        let mut coords = Vec::with_capacity(x.len() + 2);
        coords.extend_from_slice(x);
        coords.push(1.0 / hubble + 0.25 * hubble * q);
        coords.push(1.0 / hubble - 0.25 * hubble * q);
        AmbientVector::new(coords)
    });
    let tangent_map: TangentMapFn = Arc::new(move |x: &[f64], i: usize| {
        let dq = lightcone_quadratic_grad(x, i);
        let mut coords = vec![0.0; x.len() + 2];
        coords[i] = 1.0;
        coords[x.len()] = 0.25 * hubble * dq;
        coords[x.len() + 1] = -0.25 * hubble * dq;
        AmbientVector::new(coords)
    });
    let domain: ChartDomainFn = Arc::new(|_| true);
    Ok(SliceChart::from_closures(f, point_map, tangent_map, domain))
}
