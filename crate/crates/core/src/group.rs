//! The indefinite orthogonal group SO(2,n): Lie algebra generators, the
//! matrix exponential, and the nonlinear conformal action on cone slices.
//!
//! The slice action alpha^k(y) = (alpha y) / k(alpha y) is only densely
//! defined: where k(alpha y) falls to (or below) the scaled positivity
//! floor, the image recedes to the conformal boundary and the operation
//! reports an error rather than clamping.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::ambient::{AmbientVector, Signature};
use crate::embedding::Deformation;
use crate::error::{Error, Result};
use crate::report::{fmt_f64, VerificationReport};
use crate::rng::{normal_vec, standard_normal, trial_rng};
use crate::slice::{check_tangent, SliceChart, SlicePoint};
use crate::tol;

fn eta_matrix(sig: Signature) -> DMatrix<f64> {
    DMatrix::from_fn(sig.dim(), sig.dim(), |i, j| {
        if i == j {
            sig.sign(i)
        } else {
            0.0
        }
    })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// An element of the Lie algebra so(2,n): eta-antisymmetric matrix.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    m: DMatrix<f64>,
    sig: Signature,
}

impl AlgebraElement {
    pub fn new(m: DMatrix<f64>, sig: Signature) -> Result<Self> {
        let dim = sig.dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.nrows().max(m.ncols()),
            });
        }
        let eta = eta_matrix(sig);
        let violation = (m.transpose() * &eta + &eta * &m).abs().max();
        if violation > tol::ETA_ANTISYMMETRY {
            return Err(Error::NotAntisymmetric(violation));
        }
        Ok(Self { m, sig })
    }

    pub fn zero(sig: Signature) -> Self {
        Self {
            m: DMatrix::zeros(sig.dim(), sig.dim()),
            sig,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            m: &self.m * t,
            sig: self.sig,
        }
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.m.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_one(&self) -> f64 {
        one_norm(&self.m)
    }

    /// The commutator [self, other]; so(2,n) is closed under it.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Self::new(&self.m * &other.m - &other.m * &self.m, self.sig)
    }
}

/// The standard generator basis M_ab (a < b) with entries
/// (M_ab)^g_d = eta_bd delta^g_a - eta_ad delta^g_b; (n+2)(n+1)/2 elements,
/// linearly independent with disjoint supports.
pub fn algebra_basis(sig: Signature) -> Vec<AlgebraElement> {
    let dim = sig.dim();
    let mut basis = Vec::with_capacity(dim * (dim - 1) / 2);
    for a in 0..dim {
        for b in (a + 1)..dim {
            let mut m = DMatrix::zeros(dim, dim);
            m[(a, b)] = sig.sign(b);
            m[(b, a)] = -sig.sign(a);
            basis.push(AlgebraElement::new(m, sig).expect("generator is antisymmetric"));
        }
    }
    basis
}

/// Gaussian combination of the generator basis rescaled to Frobenius norm
/// `rho`; rho = 0 yields the zero element (whose exponential is the
/// identity).
pub fn random_algebra_element(
    sig: Signature,
    basis: &[AlgebraElement],
    rho: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> AlgebraElement {
    let dim = sig.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for b in basis {
        let c: f64 = standard_normal(rng);
        m += b.matrix() * c;
    }
    let element = AlgebraElement { m, sig };
    let norm = element.norm_frobenius();
    if rho == 0.0 || norm == 0.0 {
        AlgebraElement::zero(sig)
    } else {
        element.scale(rho / norm)
    }
}

/// Matrix exponential by scaling-and-squaring with the degree-13 Pade
/// approximant (Higham's coefficients).
fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    const THETA_13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.map(|v| v * 2f64.powi(-(squarings as i32)));
    let dim = a.nrows();
    let identity = DMatrix::<f64>::identity(dim, dim);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (B[13] * &a6 + B[11] * &a4 + B[9] * &a2)
        + B[7] * &a6
        + B[5] * &a4
        + B[3] * &a2
        + B[1] * &identity;
    let u = &scaled * u_inner;
    let v = &a6 * (B[12] * &a6 + B[10] * &a4 + B[8] * &a2)
        + B[6] * &a6
        + B[4] * &a4
        + B[2] * &a2
        + B[0] * &identity;

    let numer = &u + &v;
    let denom = &v - &u;
    let mut result = denom.lu().solve(&numer).ok_or(Error::SingularSystem)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// Exponentiate an algebra element into the group; elements with 1-norm
/// above the overflow bound are rejected.
pub fn exponential(x: &AlgebraElement) -> Result<GroupElement> {
    let norm = x.norm_one();
    if norm > tol::EXP_NORM_BOUND {
        return Err(Error::ExponentialOverflow(norm));
    }
    GroupElement::try_new(expm(x.matrix())?, x.sig())
}

/// An element of SO(2,n): eta-isometry with unit determinant.
#[derive(Debug, Clone)]
pub struct GroupElement {
    a: DMatrix<f64>,
    sig: Signature,
}

impl GroupElement {
    pub fn try_new(a: DMatrix<f64>, sig: Signature) -> Result<Self> {
        let dim = sig.dim();
        if a.nrows() != dim || a.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.nrows().max(a.ncols()),
            });
        }
        let eta = eta_matrix(sig);
        let isometry = (a.transpose() * &eta * &a - &eta).abs().max();
        let det = a.determinant();
        if isometry > tol::GROUP_ISOMETRY || (det - 1.0).abs() > tol::GROUP_DET {
            return Err(Error::NotInGroup { isometry, det });
        }
        Ok(Self { a, sig })
    }

    pub fn identity(sig: Signature) -> Self {
        Self {
            a: DMatrix::identity(sig.dim(), sig.dim()),
            sig,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    /// Group multiplication: (self compose other) acts as self after other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.sig != other.sig {
            return Err(Error::DimensionMismatch {
                expected: self.sig.dim(),
                got: other.sig.dim(),
            });
        }
        Self::try_new(&self.a * &other.a, self.sig)
    }

    /// The eta-orthogonality inverse eta A^T eta; exact up to the isometry
    /// residual of A.
    pub fn inverse(&self) -> Result<Self> {
        let eta = eta_matrix(self.sig);
        Self::try_new(&eta * self.a.transpose() * &eta, self.sig)
    }

    /// The linear action on the ambient space.
    pub fn apply(&self, y: &AmbientVector) -> Result<AmbientVector> {
        if y.dim() != self.sig.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sig.dim(),
                got: y.dim(),
            });
        }
        let out = &self.a * DVector::from_column_slice(y.coords());
        AmbientVector::new(out.iter().copied().collect())
    }

    /// The nonlinear slice action alpha^k(y) = (alpha y) / k(alpha y),
    /// with k taken from the slice the point belongs to.
    pub fn act_on_slice(&self, p: &SlicePoint) -> Result<SlicePoint> {
        let k = p.slice_fn();
        let z = self.apply(p.point())?;
        if !k.contains(&z) {
            return Err(Error::ConformalBoundary);
        }
        let kz = k.eval(&z)?;
        if kz <= tol::POSITIVITY_FLOOR * z.norm_inf() {
            return Err(Error::ConformalBoundary);
        }
        SlicePoint::new(z.scale(1.0 / kz), k.clone())
    }

    /// Tangent map of the slice action:
    /// (alpha^k)'(y)(V) = (alpha V)/k(alpha y)
    ///                  - dk_{alpha y}(alpha V) / k^2(alpha y) * (alpha y).
    pub fn act_on_tangent(&self, p: &SlicePoint, v: &AmbientVector) -> Result<AmbientVector> {
        check_tangent(p, v)?;
        let k = p.slice_fn();
        let z = self.apply(p.point())?;
        if !k.contains(&z) {
            return Err(Error::ConformalBoundary);
        }
        let kz = k.eval(&z)?;
        if kz <= tol::POSITIVITY_FLOOR * z.norm_inf() {
            return Err(Error::ConformalBoundary);
        }
        let av = self.apply(v)?;
        let dk_av = k.differential(&z)?.apply(&av)?;
        Ok(av.scale(1.0 / kz).add_scaled(-dk_av / (kz * kz), &z))
    }

    /// Row-major matrix serialization for replaying failing trials.
    pub fn to_json(&self) -> String {
        let mut rows = String::from("[");
        for i in 0..self.a.nrows() {
            if i > 0 {
                rows.push(',');
            }
            rows.push('[');
            for j in 0..self.a.ncols() {
                if j > 0 {
                    rows.push(',');
                }
                rows.push_str(&fmt_f64(self.a[(i, j)]));
            }
            rows.push(']');
        }
        rows.push(']');
        rows
    }
}

/// Conformal-factor residual
/// eta(T V1, T V2) - eta(V1, V2) / k^2(alpha y) with T the tangent action;
/// zero by the conformality of the slice action.
pub fn conformal_factor_residual(
    alpha: &GroupElement,
    p: &SlicePoint,
    v1: &AmbientVector,
    v2: &AmbientVector,
) -> Result<f64> {
    let t1 = alpha.act_on_tangent(p, v1)?;
    let t2 = alpha.act_on_tangent(p, v2)?;
    let z = alpha.apply(p.point())?;
    let kz = p.slice_fn().eval(&z)?;
    let sig = p.sig();
    Ok(sig.inner(&t1, &t2)? - sig.inner(v1, v2)? / (kz * kz))
}

/// Reference magnitude eta(V1, V2) / k^2(alpha y) for normalization.
pub fn conformal_factor_reference(
    alpha: &GroupElement,
    p: &SlicePoint,
    v1: &AmbientVector,
    v2: &AmbientVector,
) -> Result<f64> {
    let z = alpha.apply(p.point())?;
    let kz = p.slice_fn().eval(&z)?;
    Ok(p.sig().inner(v1, v2)? / (kz * kz))
}

/// Batched verification of the conformal-factor identity on the deformed
/// slice X_k. Group elements are sampled as exponentials of radius-`rho`
/// algebra elements; trials whose image crosses the conformal boundary are
/// counted as rejections, not failures.
pub fn conformal_campaign(
    d: &Deformation,
    base_chart: &SliceChart,
    trials: u64,
    seed: u64,
    rho: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let chart = d.push_chart(base_chart);
    let sig = chart.sig();
    let n = chart.dim();
    let dim = sig.dim();
    let basis = algebra_basis(sig);

    let outcomes: Vec<Result<Option<f64>>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Option<f64>> {
            let mut rng = trial_rng(seed, trial);
            let mut found = None;
            for _ in 0..tol::REJECTION_CAP {
                let x = normal_vec(&mut rng, n);
                if !chart.contains(&x) {
                    continue;
                }
                if let Ok(p) = chart.point(&x) {
                    found = Some((x, p));
                    break;
                }
            }
            let Some((x, p)) = found else {
                return Err(Error::DomainExhausted {
                    trial,
                    attempts: tol::REJECTION_CAP,
                });
            };
            let frame = chart.frame(&x)?;
            let combo = |coeffs: &[f64]| {
                let mut v = AmbientVector::zeros(dim);
                for (c, t) in coeffs.iter().zip(&frame) {
                    v = v.add_scaled(*c, t);
                }
                v
            };
            let v1 = combo(&normal_vec(&mut rng, n));
            let v2 = combo(&normal_vec(&mut rng, n));
            let alpha = exponential(&random_algebra_element(sig, &basis, rho, &mut rng))?;
            match conformal_factor_residual(&alpha, &p, &v1, &v2) {
                Ok(raw) => {
                    let reference = conformal_factor_reference(&alpha, &p, &v1, &v2)?;
                    Ok(Some(raw.abs() / reference.abs().max(1.0)))
                }
                Err(Error::ConformalBoundary) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut max_residual: f64 = 0.0;
    let mut sum = 0.0;
    let mut failures = 0u64;
    let mut rejections = 0u64;
    let mut accepted = 0u64;
    for outcome in outcomes {
        match outcome? {
            Some(residual) => {
                max_residual = max_residual.max(residual);
                sum += residual;
                accepted += 1;
                if residual > tolerance {
                    failures += 1;
                }
            }
            None => rejections += 1,
        }
    }
    Ok(VerificationReport {
        campaign: "conformal-action".into(),
        trials,
        max_residual,
        mean_residual: if accepted > 0 { sum / accepted as f64 } else { 0.0 },
        failures,
        rejections,
        tolerance,
        seed,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flrw::{build_flrw, ScaleFactor};
    use crate::slice::ds_graph_chart;

    fn sig2() -> Signature {
        Signature::new(2).unwrap()
    }

    #[test]
    fn basis_has_the_algebra_dimension_and_closes_under_commutators() {
        let sig = sig2();
        let basis = algebra_basis(sig);
        assert_eq!(basis.len(), 6);
        let sig4 = Signature::new(4).unwrap();
        assert_eq!(algebra_basis(sig4).len(), 15);
        // Closure: commutators stay eta-antisymmetric (the constructor
        // inside commutator() enforces it exactly).
        for a in &basis {
            for b in &basis {
                a.commutator(b).unwrap();
            }
        }
    }

    #[test]
    fn exponential_of_zero_is_the_identity() {
        let sig = sig2();
        let g = exponential(&AlgebraElement::zero(sig)).unwrap();
        assert_eq!(g.matrix(), GroupElement::identity(sig).matrix());
    }

    #[test]
    fn quarter_turn_in_a_spacelike_plane() {
        // The (1,2) plane has signature (-,-): the generator exponentiates
        // to a plain rotation block; at angle pi/2 the entries are 0, +-1.
        let sig = sig2();
        let basis = algebra_basis(sig);
        let gen12 = basis
            .iter()
            .find(|b| b.matrix()[(1, 2)] != 0.0 && b.matrix()[(0, 1)] == 0.0)
            .unwrap();
        let g = exponential(&gen12.scale(std::f64::consts::FRAC_PI_2)).unwrap();
        let m = g.matrix();
        for (i, j, expect) in [
            (0usize, 0usize, 1.0),
            (3, 3, 1.0),
            (1, 1, 0.0),
            (2, 2, 0.0),
            (1, 2, -1.0),
            (2, 1, 1.0),
        ] {
            assert!(
                (m[(i, j)] - expect).abs() <= 1e-15,
                "entry ({i},{j}) = {}",
                m[(i, j)]
            );
        }
    }

    #[test]
    fn exponentials_invert_and_preserve_eta() {
        let sig = Signature::new(3).unwrap();
        let basis = algebra_basis(sig);
        for trial in 0..100u64 {
            let mut rng = trial_rng(83, trial);
            let rho = 0.5 + 4.5 * (trial as f64 / 100.0);
            let x = random_algebra_element(sig, &basis, rho, &mut rng);
            let g = exponential(&x).unwrap();
            let ginv = exponential(&x.scale(-1.0)).unwrap();
            let product = g.matrix() * ginv.matrix();
            let dim = sig.dim();
            let residual = (&product - DMatrix::<f64>::identity(dim, dim)).abs().max();
            assert!(residual <= 1e-12, "inverse residual {residual:.3e}");
            // try_new already enforced the eta-isometry to 1e-10.
            let inv = g.inverse().unwrap();
            let back = (inv.matrix() * g.matrix() - DMatrix::<f64>::identity(dim, dim))
                .abs()
                .max();
            assert!(back <= 1e-10);
        }
    }

    #[test]
    fn overlarge_algebra_elements_are_rejected() {
        let sig = sig2();
        let basis = algebra_basis(sig);
        let mut rng = trial_rng(89, 0);
        let x = random_algebra_element(sig, &basis, 100.0, &mut rng);
        assert!(matches!(
            exponential(&x),
            Err(Error::ExponentialOverflow(_))
        ));
    }

    #[test]
    fn identity_acts_trivially_on_slice_and_tangents() {
        let chart = ds_graph_chart(2, 1.0, 1.0).unwrap();
        let x = [0.4, -0.2];
        let p = chart.point(&x).unwrap();
        let v = chart.tangent(&x, 0).unwrap();
        let id = GroupElement::identity(chart.sig());
        let q = id.act_on_slice(&p).unwrap();
        assert!(q.point().sub(p.point()).norm_inf() <= 1e-15);
        let tv = id.act_on_tangent(&p, &v).unwrap();
        assert!(tv.sub(&v).norm_inf() <= 1e-14);
        let zero = AmbientVector::zeros(4);
        assert_eq!(id.act_on_tangent(&p, &zero).unwrap(), zero);
    }

    #[test]
    fn plane_stabilizing_elements_act_linearly() {
        // Generators M_ab with a, b <= n have zero row and column n+1, so
        // their exponentials fix y^{n+1} and preserve the level f = 1 with
        // k(alpha y) = 1: the slice action reduces to the linear one.
        let chart = ds_graph_chart(2, 1.0, 1.0).unwrap();
        let sig = chart.sig();
        let basis = algebra_basis(sig);
        let stabilizers: Vec<_> = basis
            .iter()
            .filter(|b| {
                (0..sig.dim()).all(|j| {
                    b.matrix()[(sig.dim() - 1, j)] == 0.0 && b.matrix()[(j, sig.dim() - 1)] == 0.0
                })
            })
            .collect();
        assert_eq!(stabilizers.len(), 3); // so(1,2) inside so(2,2)
        let x = [0.3, 0.5];
        let p = chart.point(&x).unwrap();
        for stab in stabilizers {
            let g = exponential(&stab.scale(0.8)).unwrap();
            let z = g.apply(p.point()).unwrap();
            let kz = chart.slice_fn().eval(&z).unwrap();
            assert!((kz - 1.0).abs() <= 1e-12);
            let acted = g.act_on_slice(&p).unwrap();
            assert!(acted.point().sub(&z).norm_inf() <= 1e-12);
        }
    }

    #[test]
    fn action_satisfies_the_composition_law() {
        let chart = ds_graph_chart(2, 1.0, 1.0).unwrap();
        let sig = chart.sig();
        let basis = algebra_basis(sig);
        let mut checked = 0;
        for trial in 0..60u64 {
            let mut rng = trial_rng(97, trial);
            let x = normal_vec(&mut rng, 2);
            if !chart.contains(&x) {
                continue;
            }
            let p = chart.point(&x).unwrap();
            let a = exponential(&random_algebra_element(sig, &basis, 0.5, &mut rng)).unwrap();
            let b = exponential(&random_algebra_element(sig, &basis, 0.5, &mut rng)).unwrap();
            let (Ok(step), Ok(direct)) = (
                a.act_on_slice(&p).and_then(|q| b.act_on_slice(&q)),
                b.compose(&a).unwrap().act_on_slice(&p),
            ) else {
                continue; // boundary crossing; exercised elsewhere
            };
            let scale = direct.point().norm_inf().max(1.0);
            assert!(
                step.point().sub(direct.point()).norm_inf() <= 1e-10 * scale,
                "composition law violated"
            );
            checked += 1;
        }
        assert!(checked > 20, "too few in-domain composition trials");
    }

    #[test]
    fn compact_rotation_reaches_the_conformal_boundary() {
        // Rotating the (0, n+1) plane by pi flips the sign of y^{n+1},
        // sending k(alpha y) negative: a boundary error, not a result.
        let chart = ds_graph_chart(2, 1.0, 1.0).unwrap();
        let sig = chart.sig();
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 3)] = 1.0;
        m[(3, 0)] = -1.0;
        let x = AlgebraElement::new(m, sig).unwrap();
        let g = exponential(&x.scale(std::f64::consts::PI)).unwrap();
        let p = chart.point(&[0.0, 0.0]).unwrap();
        assert!(matches!(
            g.act_on_slice(&p),
            Err(Error::ConformalBoundary)
        ));
    }

    #[test]
    fn tangent_action_is_linear() {
        let chart = ds_graph_chart(3, 1.0, 1.0).unwrap();
        let sig = chart.sig();
        let basis = algebra_basis(sig);
        for trial in 0..50u64 {
            let mut rng = trial_rng(101, trial);
            let x = normal_vec(&mut rng, 3);
            if !chart.contains(&x) {
                continue;
            }
            let p = chart.point(&x).unwrap();
            let frame = chart.frame(&x).unwrap();
            let alpha = exponential(&random_algebra_element(sig, &basis, 0.5, &mut rng)).unwrap();
            let a: f64 = standard_normal(&mut rng);
            let b: f64 = standard_normal(&mut rng);
            let combined = frame[0].scale(a).add_scaled(b, &frame[1]);
            let (Ok(lhs), Ok(t0), Ok(t1)) = (
                alpha.act_on_tangent(&p, &combined),
                alpha.act_on_tangent(&p, &frame[0]),
                alpha.act_on_tangent(&p, &frame[1]),
            ) else {
                continue;
            };
            let rhs = t0.scale(a).add_scaled(b, &t1);
            assert!(lhs.sub(&rhs).norm_inf() <= 1e-12 * rhs.norm_inf().max(1.0));
        }
    }

    #[test]
    fn conformal_residual_is_zero_for_identity_and_small_for_boosts() {
        let chart = ds_graph_chart(2, 1.0, 1.0).unwrap();
        let x = [0.2, 0.6];
        let p = chart.point(&x).unwrap();
        let frame = chart.frame(&x).unwrap();
        let id = GroupElement::identity(chart.sig());
        assert_eq!(
            conformal_factor_residual(&id, &p, &frame[0], &frame[1]).unwrap(),
            0.0
        );
        // The conformal factor 1/k^2 is strictly positive on the domain.
        let basis = algebra_basis(chart.sig());
        let mut rng = trial_rng(103, 0);
        let alpha = exponential(&random_algebra_element(chart.sig(), &basis, 0.5, &mut rng))
            .unwrap();
        let z = alpha.apply(p.point()).unwrap();
        let kz = chart.slice_fn().eval(&z).unwrap();
        assert!(1.0 / (kz * kz) > 0.0);
        let raw = conformal_factor_residual(&alpha, &p, &frame[0], &frame[1]).unwrap();
        assert!(raw.abs() <= 1e-10);
    }

    #[test]
    fn campaign_passes_on_the_deformed_slice() {
        let space = build_flrw(ScaleFactor::power(2.0), 2, 1.0).unwrap();
        let report = conformal_campaign(
            space.deformation(),
            space.base_chart(),
            300,
            11,
            0.5,
            tol::CAMPAIGN_DEFAULT,
        )
        .unwrap();
        assert_eq!(report.failures, 0, "max {:.3e}", report.max_residual);
        assert!(report.max_residual <= 1e-9);
    }

    #[test]
    fn large_radius_campaign_logs_rejections_without_failing() {
        let space = build_flrw(ScaleFactor::zero(), 2, 1.0).unwrap();
        let report = conformal_campaign(
            space.deformation(),
            space.base_chart(),
            400,
            13,
            5.0,
            tol::CAMPAIGN_DEFAULT,
        )
        .unwrap();
        assert!(report.rejections > 0, "expected boundary crossings");
        assert_eq!(report.failures, 0, "max {:.3e}", report.max_residual);
    }

    #[test]
    fn group_element_serializes_row_major() {
        let sig = sig2();
        let id = GroupElement::identity(sig);
        let parsed: serde_json::Value = serde_json::from_str(&id.to_json()).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 4);
        assert_eq!(parsed[0][0].as_f64().unwrap(), 1.0);
        assert_eq!(parsed[0][1].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn non_group_matrices_are_rejected() {
        let sig = sig2();
        let mut m = DMatrix::<f64>::identity(4, 4);
        m[(0, 0)] = 2.0;
        assert!(matches!(
            GroupElement::try_new(m, sig),
            Err(Error::NotInGroup { .. })
        ));
        let skew = DMatrix::<f64>::from_fn(4, 4, |i, j| if i < j { 1.0 } else { 0.0 });
        assert!(AlgebraElement::new(skew, sig).is_err());
    }
}
