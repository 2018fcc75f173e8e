//! The deformation map between cone slices, its push-forward, and the
//! Weyl relation between the induced metrics.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::ambient::AmbientVector;
use crate::error::{Error, Result};
use crate::homogeneous::{deformed, HomogeneousFn};
use crate::report::VerificationReport;
use crate::rng::{normal_vec, trial_rng};
use crate::slice::{check_tangent, slice_residuals, SliceChart, SlicePoint};
use crate::tol;

/// The deformation triple (f, l, k = e^{-l} f): f degree one defines the
/// base slice X_f, l degree zero the rescaling, k the deformed slice X_k.
#[derive(Clone)]
pub struct Deformation {
    f: HomogeneousFn,
    l: HomogeneousFn,
    k: HomogeneousFn,
}

impl Deformation {
    pub fn new(f: HomogeneousFn, l: HomogeneousFn) -> Result<Self> {
        let k = deformed(&f, &l)?;
        Ok(Self { f, l, k })
    }

    pub fn base_fn(&self) -> &HomogeneousFn {
        &self.f
    }

    pub fn log_factor(&self) -> &HomogeneousFn {
        &self.l
    }

    pub fn deformed_fn(&self) -> &HomogeneousFn {
        &self.k
    }

    fn require_on_base(&self, p: &SlicePoint) -> Result<()> {
        let (cone, level) = slice_residuals(p.point(), &self.f)?;
        let cone_scale = p.point().norm_inf().powi(2).max(1.0);
        if cone.abs() > tol::CONE_MEMBERSHIP * cone_scale || level.abs() > tol::LEVEL_MEMBERSHIP {
            return Err(Error::NotOnSlice { cone, level });
        }
        Ok(())
    }

    /// The deformation map y -> e^{l(y)} y, sending X_f onto X_k.
    pub fn apply(&self, p: &SlicePoint) -> Result<SlicePoint> {
        self.require_on_base(p)?;
        let scale = self.l.eval(p.point())?.exp();
        SlicePoint::new(p.point().scale(scale), self.k.clone())
    }

    /// Push-forward of a tangent vector: e^l (V + <dl, V> D), with D the
    /// dilation vector at the base point.
    pub fn push_tangent(&self, p: &SlicePoint, v: &AmbientVector) -> Result<AmbientVector> {
        self.require_on_base(p)?;
        let base = SlicePoint::new(p.point().clone(), self.f.clone())?;
        check_tangent(&base, v)?;
        let y = p.point();
        let scale = self.l.eval(y)?.exp();
        let dl_v = self.l.differential(y)?.apply(v)?;
        Ok(v.add_scaled(dl_v, y).scale(scale))
    }

    /// Raw Weyl-relation residual eta(push U, push V) - e^{2l} eta(U, V);
    /// identically zero by the metric relation between X_f and X_k.
    pub fn weyl_residual(
        &self,
        p: &SlicePoint,
        u: &AmbientVector,
        v: &AmbientVector,
    ) -> Result<f64> {
        let sig = self.f.sig();
        let pu = self.push_tangent(p, u)?;
        let pv = self.push_tangent(p, v)?;
        let factor = (2.0 * self.l.eval(p.point())?).exp();
        Ok(sig.inner(&pu, &pv)? - factor * sig.inner(u, v)?)
    }

    /// Reference magnitude e^{2l} eta(U, V) used to normalize residuals.
    pub fn weyl_reference(
        &self,
        p: &SlicePoint,
        u: &AmbientVector,
        v: &AmbientVector,
    ) -> Result<f64> {
        let factor = (2.0 * self.l.eval(p.point())?).exp();
        Ok(factor * self.f.sig().inner(u, v)?)
    }

    /// Transport a chart of X_f to a chart of X_k by composing with the
    /// deformation map and its push-forward.
    pub fn push_chart(&self, chart: &SliceChart) -> SliceChart {
        let map = self.clone();
        let source = chart.clone();
        let point_map = Arc::new(move |x: &[f64]| {
            let p = source.point(x)?;
            Ok(map.apply(&p)?.point().clone())
        });
        let map = self.clone();
        let source = chart.clone();
        let tangent_map = Arc::new(move |x: &[f64], i: usize| {
            let p = source.point(x)?;
            let v = source.tangent(x, i)?;
            map.push_tangent(&p, &v)
        });
        let l = self.l.clone();
        let source = chart.clone();
        let domain = Arc::new(move |x: &[f64]| {
            source.contains(x)
                && source
                    .point_raw(x)
                    .map(|y| l.contains(&y))
                    .unwrap_or(false)
        });
        SliceChart::from_closures(self.k.clone(), point_map, tangent_map, domain)
    }
}

/// Max entrywise difference between the Gram matrix of the pushed chart
/// frame and e^{2l} times the base Gram matrix; the sample-level statement
/// of the isometry between (X_f, e^{2l} g^f) and (X_k, g^k).
pub fn isometry_gram_residual(d: &Deformation, chart: &SliceChart, x: &[f64]) -> Result<f64> {
    let p = chart.point(x)?;
    let frame = chart.frame(x)?;
    let pushed: Vec<AmbientVector> = frame
        .iter()
        .map(|v| d.push_tangent(&p, v))
        .collect::<Result<_>>()?;
    let sig = chart.sig();
    let factor = (2.0 * d.log_factor().eval(p.point())?).exp();
    let mut worst: f64 = 0.0;
    for i in 0..frame.len() {
        for j in 0..frame.len() {
            let lhs = sig.inner(&pushed[i], &pushed[j])?;
            let rhs = factor * sig.inner(&frame[i], &frame[j])?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// Batched verification of the Weyl relation: seeded random chart points
/// and tangent pairs, residuals normalized by max(1, |e^{2l} eta(U, V)|).
///
/// Trials are independent streams; parallel and serial execution aggregate
/// in trial order and produce identical reports.
pub fn deformation_campaign(
    d: &Deformation,
    chart: &SliceChart,
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = chart.dim();
    let dim = chart.sig().dim();
    let outcomes: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let mut rng = trial_rng(seed, trial);
            let mut found = None;
            for _ in 0..tol::REJECTION_CAP {
                let x = normal_vec(&mut rng, n);
                if !chart.contains(&x) {
                    continue;
                }
                let Ok(p) = chart.point(&x) else { continue };
                if !d.log_factor().contains(p.point()) {
                    continue;
                }
                found = Some((x, p));
                break;
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
            let u = combo(&normal_vec(&mut rng, n));
            let v = combo(&normal_vec(&mut rng, n));
            let raw = d.weyl_residual(&p, &u, &v)?;
            let reference = d.weyl_reference(&p, &u, &v)?;
            Ok(raw.abs() / reference.abs().max(1.0))
        })
        .collect();

    let mut max_residual: f64 = 0.0;
    let mut sum = 0.0;
    let mut failures = 0u64;
    for outcome in outcomes {
        let residual = outcome?;
        max_residual = max_residual.max(residual);
        sum += residual;
        if residual > tolerance {
            failures += 1;
        }
    }
    Ok(VerificationReport {
        campaign: "weyl-deformation".into(),
        trials,
        max_residual,
        mean_residual: if trials > 0 { sum / trials as f64 } else { 0.0 },
        failures,
        rejections: 0,
        tolerance,
        seed,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}
