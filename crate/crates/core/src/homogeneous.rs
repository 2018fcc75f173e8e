//! Homogeneous scalar functions of known degree with exact differentials.
//!
//! A [`HomogeneousFn`] carries its evaluator in one of three modes:
//! analytic closed form (built-ins), forward-mode dual numbers (composite
//! and user-supplied functions), or central finite differences. The last
//! mode is second-order accurate and exists as the independent oracle for
//! the other two.

use std::sync::Arc;

use crate::ambient::{AmbientCovector, AmbientVector, Signature};
use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::rng::{log_uniform, normal_vec, trial_rng};
use crate::tol;

pub type RealFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type CovectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type DualEvalFn = Arc<dyn Fn(&[Dual]) -> Result<Dual> + Send + Sync>;
pub type ContainsFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Ray-invariant membership predicate: contains(y) must imply contains(t y)
/// for every t > 0. This is a construction contract, checkable by sampling.
#[derive(Clone)]
pub struct DomainPredicate {
    contains: ContainsFn,
}

impl DomainPredicate {
    pub fn new(contains: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        Self {
            contains: Arc::new(contains),
        }
    }

    /// The whole ambient space.
    pub fn full() -> Self {
        Self::new(|_| true)
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        (self.contains)(coords)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let a = self.contains.clone();
        let b = other.contains.clone();
        Self::new(move |y| a(y) && b(y))
    }
}

#[derive(Clone)]
enum DiffMode {
    Analytic {
        eval: RealFn,
        differential: CovectorFn,
    },
    DualForward {
        eval: DualEvalFn,
    },
    CentralDifference {
        eval: RealFn,
    },
}

/// A degree-d homogeneous scalar function on (a ray-invariant subset of)
/// the ambient space. Evaluators must be pure; values are immutable and
/// freely shareable across threads.
#[derive(Clone)]
pub struct HomogeneousFn {
    sig: Signature,
    degree: f64,
    mode: DiffMode,
    domain: DomainPredicate,
}

impl HomogeneousFn {
    pub fn analytic(
        sig: Signature,
        degree: f64,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        differential: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        domain: DomainPredicate,
    ) -> Self {
        Self {
            sig,
            degree,
            mode: DiffMode::Analytic {
                eval: Arc::new(eval),
                differential: Arc::new(differential),
            },
            domain,
        }
    }

    pub fn dual_forward(
        sig: Signature,
        degree: f64,
        eval: impl Fn(&[Dual]) -> Result<Dual> + Send + Sync + 'static,
        domain: DomainPredicate,
    ) -> Self {
        Self {
            sig,
            degree,
            mode: DiffMode::DualForward {
                eval: Arc::new(eval),
            },
            domain,
        }
    }

    /// Central-difference mode; retained as the independent differentiation
    /// oracle against the analytic and dual paths.
    pub fn finite_difference(
        sig: Signature,
        degree: f64,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        domain: DomainPredicate,
    ) -> Self {
        Self {
            sig,
            degree,
            mode: DiffMode::CentralDifference {
                eval: Arc::new(eval),
            },
            domain,
        }
    }

    /// The linear (degree-one) function y -> <w, y>; its own differential.
    pub fn linear_form(sig: Signature, w: AmbientCovector) -> Result<Self> {
        if w.dim() != sig.dim() {
            return Err(Error::DimensionMismatch {
                expected: sig.dim(),
                got: w.dim(),
            });
        }
        let w_eval = w.clone();
        let w_diff = w;
        Ok(Self::analytic(
            sig,
            1.0,
            move |y| w_eval.components().iter().zip(y).map(|(a, b)| a * b).sum(),
            move |_| w_diff.components().to_vec(),
            DomainPredicate::full(),
        ))
    }

    /// Degree-zero constant.
    pub fn constant(sig: Signature, c: f64) -> Self {
        let dim = sig.dim();
        Self::analytic(
            sig,
            0.0,
            move |_| c,
            move |_| vec![0.0; dim],
            DomainPredicate::full(),
        )
    }

    pub fn zero(sig: Signature) -> Self {
        Self::constant(sig, 0.0)
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn domain(&self) -> &DomainPredicate {
        &self.domain
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.sig.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sig.dim(),
                got,
            });
        }
        Ok(())
    }

    pub fn contains(&self, y: &AmbientVector) -> bool {
        y.dim() == self.sig.dim() && self.domain.contains(y.coords())
    }

    pub fn eval(&self, y: &AmbientVector) -> Result<f64> {
        self.check_dim(y.dim())?;
        if !self.domain.contains(y.coords()) {
            return Err(Error::OutOfDomain);
        }
        let v = match &self.mode {
            DiffMode::Analytic { eval, .. } | DiffMode::CentralDifference { eval } => {
                eval(y.coords())
            }
            DiffMode::DualForward { eval } => eval(&Dual::wrap_point(y.coords()))?.value(),
        };
        if !v.is_finite() {
            return Err(Error::NonFinite("function value"));
        }
        Ok(v)
    }

    /// The differential df_y as a covector: df_y(V) is the directional
    /// derivative along V.
    pub fn differential(&self, y: &AmbientVector) -> Result<AmbientCovector> {
        self.check_dim(y.dim())?;
        if !self.domain.contains(y.coords()) {
            return Err(Error::OutOfDomain);
        }
        let components = match &self.mode {
            DiffMode::Analytic { differential, .. } => differential(y.coords()),
            DiffMode::DualForward { eval } => {
                let d = eval(&Dual::seed_point(y.coords()))?;
                if !d.is_finite() {
                    return Err(Error::DifferentiationFailure);
                }
                d.grad().to_vec()
            }
            DiffMode::CentralDifference { eval } => {
                let h = tol::FD_STEP_FACTOR * y.norm_inf().max(1.0);
                let dim = self.sig.dim();
                let mut components = vec![0.0; dim];
                for a in 0..dim {
                    let mut plus = y.coords().to_vec();
                    let mut minus = y.coords().to_vec();
                    plus[a] += h;
                    minus[a] -= h;
                    if !self.domain.contains(&plus) || !self.domain.contains(&minus) {
                        return Err(Error::OutOfDomain);
                    }
                    components[a] = (eval(&plus) - eval(&minus)) / (2.0 * h);
                }
                components
            }
        };
        AmbientCovector::new(components).map_err(|_| Error::DifferentiationFailure)
    }

    /// Directional derivative df_y(v).
    pub fn directional_derivative(&self, y: &AmbientVector, v: &AmbientVector) -> Result<f64> {
        self.differential(y)?.apply(v)
    }

    /// Evaluate on dual numbers, propagating derivatives by the chain rule.
    /// Non-dual modes combine the plain value with the differential, which
    /// is exact for any gradient seeding.
    pub fn eval_dual(&self, yd: &[Dual]) -> Result<Dual> {
        self.check_dim(yd.len())?;
        let coords: Vec<f64> = yd.iter().map(Dual::value).collect();
        if !self.domain.contains(&coords) {
            return Err(Error::OutOfDomain);
        }
        if let DiffMode::DualForward { eval } = &self.mode {
            let d = eval(yd)?;
            if !d.is_finite() {
                return Err(Error::NonFinite("dual function value"));
            }
            return Ok(d);
        }
        let y = AmbientVector::new(coords)?;
        let v = self.eval(&y)?;
        let grad_dim = yd.first().map(|d| d.grad().len()).unwrap_or(0);
        if grad_dim == 0 {
            return Ok(Dual::constant(v, 0));
        }
        let w = self.differential(&y)?;
        let mut grad = vec![0.0; grad_dim];
        for (a, wa) in w.components().iter().enumerate() {
            for (g, slot) in grad.iter_mut().enumerate() {
                *slot += wa * yd[a].grad()[g];
            }
        }
        let out = Dual::seeded(v, grad);
        if !out.is_finite() {
            return Err(Error::DifferentiationFailure);
        }
        Ok(out)
    }
}

/// Max relative homogeneity residual |f(t y) - t^d f(y)| / max(1, |t^d f(y)|)
/// over seeded samples with t log-uniform in [0.1, 10] and y standard
/// Gaussian, rejection-sampled into the domain.
pub fn check_homogeneity(f: &HomogeneousFn, samples: u64, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Inconclusive(0));
    }
    let dim = f.sig().dim();
    let mut max_rel: f64 = 0.0;
    let mut accepted = 0u64;
    for trial in 0..samples {
        let mut rng = trial_rng(seed, trial);
        let t = log_uniform(&mut rng, 0.1, 10.0);
        let mut found = None;
        for _ in 0..tol::REJECTION_CAP {
            let coords = normal_vec(&mut rng, dim);
            let y = match AmbientVector::new(coords) {
                Ok(y) => y,
                Err(_) => continue,
            };
            let scaled = y.scale(t);
            if f.contains(&y) && f.contains(&scaled) {
                found = Some((y, scaled));
                break;
            }
        }
        let Some((y, scaled)) = found else {
            continue;
        };
        let reference = t.powf(f.degree()) * f.eval(&y)?;
        let residual = (f.eval(&scaled)? - reference).abs() / reference.abs().max(1.0);
        max_rel = max_rel.max(residual);
        accepted += 1;
    }
    if accepted == 0 {
        return Err(Error::Inconclusive(samples as usize));
    }
    Ok(max_rel)
}

/// Euler identity residual df_y(y) - d * f(y); zero for a true degree-d
/// homogeneous function.
pub fn euler_residual(f: &HomogeneousFn, y: &AmbientVector) -> Result<f64> {
    let pairing = f.differential(y)?.apply(y)?;
    Ok(pairing - f.degree() * f.eval(y)?)
}

/// The deformed slice function k = e^{-l} f from a degree-one f and a
/// degree-zero l. The differential follows the product and chain rules,
/// dk = e^{-l} (df - f dl), realized through dual evaluation of the parts.
/// The domain is the intersection of both domains restricted to k > 0
/// (scaled floor, which keeps the predicate ray-invariant).
pub fn deformed(f: &HomogeneousFn, l: &HomogeneousFn) -> Result<HomogeneousFn> {
    if f.degree() != 1.0 || l.degree() != 0.0 {
        return Err(Error::InvalidSpec(format!(
            "deformation requires degrees (1, 0), got ({}, {})",
            f.degree(),
            l.degree()
        )));
    }
    if f.sig() != l.sig() {
        return Err(Error::DimensionMismatch {
            expected: f.sig().dim(),
            got: l.sig().dim(),
        });
    }
    let sig = f.sig();
    let (fd, ld) = (f.clone(), l.clone());
    let eval = move |yd: &[Dual]| -> Result<Dual> {
        let lv = ld.eval_dual(yd)?;
        let fv = fd.eval_dual(yd)?;
        Ok(&(-&lv).exp() * &fv)
    };
    let (fdom, ldom) = (f.clone(), l.clone());
    let domain = DomainPredicate::new(move |coords: &[f64]| {
        if !fdom.domain().contains(coords) || !ldom.domain().contains(coords) {
            return false;
        }
        let Ok(y) = AmbientVector::new(coords.to_vec()) else {
            return false;
        };
        let (Ok(fv), Ok(lv)) = (fdom.eval(&y), ldom.eval(&y)) else {
            return false;
        };
        let k = (-lv).exp() * fv;
        k.is_finite() && k > tol::POSITIVITY_FLOOR * y.norm_inf()
    });
    let k = HomogeneousFn::dual_forward(sig, 1.0, eval, domain);
    probe_nonempty_domain(&k)?;
    Ok(k)
}

/// The canonical degree-zero extension of a function defined on the slice
/// X_f: l(y) = a(y / f(y)). Its restriction to X_f is a itself, where
/// f(y) = 1.
pub fn extend_scale_factor(
    a: DualEvalFn,
    a_domain: DomainPredicate,
    f: &HomogeneousFn,
) -> Result<HomogeneousFn> {
    if f.degree() != 1.0 {
        return Err(Error::InvalidSpec(format!(
            "scale-factor extension requires a degree-one slice function, got degree {}",
            f.degree()
        )));
    }
    let sig = f.sig();
    let fe = f.clone();
    let ae = a.clone();
    let eval = move |yd: &[Dual]| -> Result<Dual> {
        let fv = fe.eval_dual(yd)?;
        let projected: Vec<Dual> = yd.iter().map(|c| c / &fv).collect();
        ae(&projected)
    };
    let fdom = f.clone();
    let domain = DomainPredicate::new(move |coords: &[f64]| {
        if !fdom.domain().contains(coords) {
            return false;
        }
        let Ok(y) = AmbientVector::new(coords.to_vec()) else {
            return false;
        };
        let Ok(fv) = fdom.eval(&y) else {
            return false;
        };
        if fv <= tol::POSITIVITY_FLOOR * y.norm_inf() {
            return false;
        }
        let projected: Vec<f64> = coords.iter().map(|c| c / fv).collect();
        a_domain.contains(&projected)
    });
    Ok(HomogeneousFn::dual_forward(sig, 0.0, eval, domain))
}

/// Seeded Gaussian probe for an empty domain; guards composite
/// constructions against disjoint factor domains.
fn probe_nonempty_domain(f: &HomogeneousFn) -> Result<()> {
    let dim = f.sig().dim();
    for trial in 0..256u64 {
        let mut rng = trial_rng(0x646f_6d61_696e, trial);
        let coords = normal_vec(&mut rng, dim);
        if f.domain().contains(&coords) {
            return Ok(());
        }
    }
    Err(Error::EmptyDomainIntersection)
}
