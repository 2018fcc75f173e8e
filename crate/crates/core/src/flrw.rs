//! Applications layer: standard slice functions, FLRW spaces as deformed
//! de Sitter slices, pointwise metric comparison, and the osculating-slice
//! classification.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::ambient::{AmbientCovector, AmbientVector, Signature};
use crate::dual::Dual;
use crate::embedding::Deformation;
use crate::error::{Error, Result};
use crate::homogeneous::{extend_scale_factor, DomainPredicate, HomogeneousFn};
use crate::report::{fmt_f64, fmt_f64_array};
use crate::slice::{ds_graph_chart, SliceChart, SlicePoint};
use crate::tol;

/// The three standard slice families and their defining linear functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceKind {
    DeSitter,
    AntiDeSitter,
    MinkowskiNull,
}

impl fmt::Display for SliceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SliceKind::DeSitter => "deSitter",
            SliceKind::AntiDeSitter => "antiDeSitter",
            SliceKind::MinkowskiNull => "minkowskiNull",
        })
    }
}

/// A standard slice: the de Sitter plane H y^{n+1}, the anti-de Sitter
/// plane H y^n, or the null combination H (y^n + y^{n+1}) / 2. Their
/// raised gradients have eta-norm squared +H^2, -H^2, and 0 respectively.
#[derive(Clone)]
pub struct StandardSlice {
    kind: SliceKind,
    hubble: f64,
    sig: Signature,
    f: HomogeneousFn,
}

pub fn standard_slice(kind: SliceKind, n: usize, hubble: f64) -> Result<StandardSlice> {
    let sig = Signature::new(n)?;
    if hubble.is_nan() || hubble <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "curvature scale must be positive, got {hubble}"
        )));
    }
    let dim = sig.dim();
    let mut w = vec![0.0; dim];
    match kind {
        SliceKind::DeSitter => w[dim - 1] = hubble,
        SliceKind::AntiDeSitter => w[dim - 2] = hubble,
        SliceKind::MinkowskiNull => {
            w[dim - 2] = hubble / 2.0;
            w[dim - 1] = hubble / 2.0;
        }
    }
    let f = HomogeneousFn::linear_form(sig, AmbientCovector::new(w)?)?;
    Ok(StandardSlice {
        kind,
        hubble,
        sig,
        f,
    })
}

impl StandardSlice {
    pub fn kind(&self) -> SliceKind {
        self.kind
    }

    pub fn hubble(&self) -> f64 {
        self.hubble
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn defining_fn(&self) -> &HomogeneousFn {
        &self.f
    }

    /// eta-norm squared of the raised gradient; the sign classifies the
    /// slice family.
    pub fn gradient_norm_sq(&self) -> Result<f64> {
        let probe = AmbientVector::basis(self.sig.dim(), 0);
        let raised = self.sig.raise(&self.f.differential(&probe)?)?;
        self.sig.inner(&raised, &raised)
    }
}

/// Parsed scale-factor specification from the CLI mini-language.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleFactorSpec {
    Zero,
    Const(f64),
    /// a(x) = p ln(x^0): a power law in the chart time coordinate.
    Power(f64),
}

impl FromStr for ScaleFactorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(ScaleFactorSpec::Zero);
        }
        if let Some(c) = s.strip_prefix("const:") {
            let value: f64 = c
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad constant in scale factor '{s}'")))?;
            if !value.is_finite() {
                return Err(Error::InvalidSpec(format!("non-finite constant in '{s}'")));
            }
            return Ok(ScaleFactorSpec::Const(value));
        }
        if let Some(p) = s.strip_prefix("power:") {
            let value: f64 = p
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad exponent in scale factor '{s}'")))?;
            if !value.is_finite() {
                return Err(Error::InvalidSpec(format!("non-finite exponent in '{s}'")));
            }
            return Ok(ScaleFactorSpec::Power(value));
        }
        Err(Error::InvalidSpec(format!(
            "unknown scale factor '{s}'; expected zero, const:<c>, or power:<p>"
        )))
    }
}

impl fmt::Display for ScaleFactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleFactorSpec::Zero => f.write_str("zero"),
            ScaleFactorSpec::Const(c) => write!(f, "const:{c}"),
            ScaleFactorSpec::Power(p) => write!(f, "power:{p}"),
        }
    }
}

type ChartDualFn = Arc<dyn Fn(&[Dual]) -> Result<Dual> + Send + Sync>;
type ChartDomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A scale factor given as a (twice differentiable) function of the de
/// Sitter graph-chart coordinates; evaluated through dual numbers so its
/// extension differentiates exactly.
#[derive(Clone)]
pub struct ScaleFactor {
    name: String,
    spec: Option<ScaleFactorSpec>,
    chart_fn: ChartDualFn,
    chart_domain: ChartDomainFn,
}

impl ScaleFactor {
    pub fn zero() -> Self {
        Self::from_spec(ScaleFactorSpec::Zero)
    }

    pub fn constant(c: f64) -> Self {
        Self::from_spec(ScaleFactorSpec::Const(c))
    }

    pub fn power(p: f64) -> Self {
        Self::from_spec(ScaleFactorSpec::Power(p))
    }

    pub fn from_spec(spec: ScaleFactorSpec) -> Self {
        let (chart_fn, chart_domain): (ChartDualFn, ChartDomainFn) = match spec {
            ScaleFactorSpec::Zero => (
                Arc::new(|x: &[Dual]| {
                    Ok(Dual::constant(
                        0.0,
                        x.first().map(|d| d.grad().len()).unwrap_or(0),
                    ))
                }),
                Arc::new(|_: &[f64]| true),
            ),
            ScaleFactorSpec::Const(c) => (
                Arc::new(move |x: &[Dual]| {
                    Ok(Dual::constant(
                        c,
                        x.first().map(|d| d.grad().len()).unwrap_or(0),
                    ))
                }),
                Arc::new(|_: &[f64]| true),
            ),
            ScaleFactorSpec::Power(p) => (
                Arc::new(move |x: &[Dual]| Ok(x[0].ln().scale(p))),
                Arc::new(|x: &[f64]| x[0] > 0.0),
            ),
        };
        Self {
            name: spec.to_string(),
            spec: Some(spec),
            chart_fn,
            chart_domain,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::from_spec(s.parse()?))
    }

    /// A user-supplied chart function; the evaluator must be pure and twice
    /// differentiable on its domain.
    pub fn custom(
        name: impl Into<String>,
        chart_fn: impl Fn(&[Dual]) -> Result<Dual> + Send + Sync + 'static,
        chart_domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            spec: None,
            chart_fn: Arc::new(chart_fn),
            chart_domain: Arc::new(chart_domain),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> Option<ScaleFactorSpec> {
        self.spec
    }

    pub fn contains_chart(&self, x: &[f64]) -> bool {
        (self.chart_domain)(x)
    }

    /// Value a(x) at chart coordinates.
    pub fn eval_chart(&self, x: &[f64]) -> Result<f64> {
        if !(self.chart_domain)(x) {
            return Err(Error::OutOfDomain);
        }
        let value = (self.chart_fn)(&Dual::wrap_point(x))?.value();
        if !value.is_finite() {
            return Err(Error::NonFinite("scale factor value"));
        }
        Ok(value)
    }
}

/// An FLRW-type space W = e^l Sigma built from a scale factor on the de
/// Sitter slice Sigma = X_f. Exposes the deformation triple for the metric
/// and group campaigns.
#[derive(Clone)]
pub struct FlrwSpace {
    base: StandardSlice,
    scale_factor: ScaleFactor,
    deformation: Deformation,
    base_chart: SliceChart,
}

/// Extend the scale factor to a degree-zero l by ray projection, deform
/// f_dS into k = e^{-l} f, and package the slice data.
///
/// On the upper-sheet graph chart, the chart coordinates of a slice point
/// are its first n ambient coordinates, so the chart function composes with
/// the projection directly.
pub fn build_flrw(a: ScaleFactor, n: usize, hubble: f64) -> Result<FlrwSpace> {
    let base = standard_slice(SliceKind::DeSitter, n, hubble)?;
    let chart_fn = a.chart_fn.clone();
    let ambient_fn = move |yd: &[Dual]| -> Result<Dual> { chart_fn(&yd[..n]) };
    let chart_domain = a.chart_domain.clone();
    let ambient_domain = DomainPredicate::new(move |y: &[f64]| chart_domain(&y[..n]));
    let l = extend_scale_factor(Arc::new(ambient_fn), ambient_domain, base.defining_fn())?;
    let deformation = Deformation::new(base.defining_fn().clone(), l)?;
    let base_chart = ds_graph_chart(n, hubble, 1.0)?;
    Ok(FlrwSpace {
        base,
        scale_factor: a,
        deformation,
        base_chart,
    })
}

impl FlrwSpace {
    pub fn base(&self) -> &StandardSlice {
        &self.base
    }

    pub fn scale_factor(&self) -> &ScaleFactor {
        &self.scale_factor
    }

    pub fn deformation(&self) -> &Deformation {
        &self.deformation
    }

    /// Graph chart of the base de Sitter slice (upper sheet).
    pub fn base_chart(&self) -> &SliceChart {
        &self.base_chart
    }

    /// Chart of W obtained by pushing the base chart through the
    /// deformation map.
    pub fn w_chart(&self) -> SliceChart {
        self.deformation.push_chart(&self.base_chart)
    }

    /// The deformed slice function k with X_k = W.
    pub fn k(&self) -> &HomogeneousFn {
        self.deformation.deformed_fn()
    }

    /// Max entrywise difference between the Gram matrix of pushed chart
    /// tangents on W and e^{2a(x)} times the de Sitter Gram matrix: the
    /// pointwise form of the Weyl rescaling g_W = e^{2a} g_dS.
    pub fn metric_residual(&self, x: &[f64]) -> Result<f64> {
        let p = self.base_chart.point(x)?;
        let frame = self.base_chart.frame(x)?;
        let pushed: Vec<AmbientVector> = frame
            .iter()
            .map(|v| self.deformation.push_tangent(&p, v))
            .collect::<Result<_>>()?;
        let factor = (2.0 * self.scale_factor.eval_chart(x)?).exp();
        let sig = self.base.sig();
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
}

/// Sign classification of the osculating slice at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceClass {
    DeSitter,
    AntiDeSitter,
    Null,
}

impl fmt::Display for SliceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SliceClass::DeSitter => "deSitter",
            SliceClass::AntiDeSitter => "antiDeSitter",
            SliceClass::Null => "null",
        })
    }
}

/// The tangent-plane slice data at a point y_o of X_k: the raised gradient
/// K_o, its eta-norm squared, the sign classification, and the local
/// linear slice function.
pub struct OsculatingResult {
    gradient: AmbientVector,
    norm_sq: f64,
    classification: SliceClass,
    f_local: HomogeneousFn,
}

impl OsculatingResult {
    pub fn gradient(&self) -> &AmbientVector {
        &self.gradient
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn classification(&self) -> SliceClass {
        self.classification
    }

    /// The linear degree-one function f(y) = dk_{y_o}(y); by the Euler
    /// identity f(y_o) = k(y_o) = 1, so its slice is tangent to X_k at y_o.
    pub fn f_local(&self) -> &HomogeneousFn {
        &self.f_local
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"classification\":\"{}\",\"normSq\":{},\"K\":{}}}",
            self.classification,
            fmt_f64(self.norm_sq),
            fmt_f64_array(self.gradient.coords()),
        )
    }
}

/// Classify the osculating slice at y_o by the eta-norm sign of the raised
/// gradient of k, inside a null band of width [`tol::NULL_BAND`] (the
/// degenerate case the local statement excludes).
pub fn osculating_slice(k: &HomogeneousFn, y_o: &SlicePoint) -> Result<OsculatingResult> {
    let sig = k.sig();
    let w = k.differential(y_o.point())?;
    let gradient = sig.raise(&w)?;
    let norm_sq = sig.inner(&gradient, &gradient)?;
    let classification = if norm_sq > tol::NULL_BAND {
        SliceClass::DeSitter
    } else if norm_sq < -tol::NULL_BAND {
        SliceClass::AntiDeSitter
    } else {
        SliceClass::Null
    };
    let f_local = HomogeneousFn::linear_form(sig, w)?;
    Ok(OsculatingResult {
        gradient,
        norm_sq,
        classification,
        f_local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::scalar_curvature;
    use crate::homogeneous::check_homogeneity;
    use crate::rng::{normal_vec, trial_rng};
    use crate::slice::ray_project;

    #[test]
    fn standard_slice_gradient_signs() {
        // Raised differentials: (0,0,0,H), (0,0,-H,0), (0,0,-H/2,H/2).
        let ds = standard_slice(SliceKind::DeSitter, 2, 1.0).unwrap();
        assert_eq!(ds.gradient_norm_sq().unwrap(), 1.0);
        let ads = standard_slice(SliceKind::AntiDeSitter, 2, 1.0).unwrap();
        assert_eq!(ads.gradient_norm_sq().unwrap(), -1.0);
        let null = standard_slice(SliceKind::MinkowskiNull, 2, 1.0).unwrap();
        assert_eq!(null.gradient_norm_sq().unwrap(), 0.0);
        let scaled = standard_slice(SliceKind::DeSitter, 3, 2.0).unwrap();
        assert_eq!(scaled.gradient_norm_sq().unwrap(), 4.0);
    }

    #[test]
    fn standard_slice_functions_are_exactly_homogeneous() {
        for kind in [
            SliceKind::DeSitter,
            SliceKind::AntiDeSitter,
            SliceKind::MinkowskiNull,
        ] {
            let slice = standard_slice(kind, 3, 1.5).unwrap();
            let residual = check_homogeneity(slice.defining_fn(), 1000, 19).unwrap();
            assert!(residual <= 1e-14, "{kind}: {residual:.3e}");
        }
    }

    #[test]
    fn standard_slice_differentials_match_the_finite_difference_oracle() {
        use crate::homogeneous::{DomainPredicate, HomogeneousFn};
        let sig = Signature::new(2).unwrap();
        let oracles: [(SliceKind, HomogeneousFn); 3] = [
            (
                SliceKind::DeSitter,
                HomogeneousFn::finite_difference(sig, 1.0, |y| y[3], DomainPredicate::full()),
            ),
            (
                SliceKind::AntiDeSitter,
                HomogeneousFn::finite_difference(sig, 1.0, |y| y[2], DomainPredicate::full()),
            ),
            (
                SliceKind::MinkowskiNull,
                HomogeneousFn::finite_difference(
                    sig,
                    1.0,
                    |y| 0.5 * (y[2] + y[3]),
                    DomainPredicate::full(),
                ),
            ),
        ];
        for (kind, oracle) in oracles {
            let slice = standard_slice(kind, 2, 1.0).unwrap();
            for trial in 0..100u64 {
                let mut rng = trial_rng(23, trial);
                let y = AmbientVector::new(normal_vec(&mut rng, 4)).unwrap();
                let exact = slice.defining_fn().differential(&y).unwrap();
                let fd = oracle.differential(&y).unwrap();
                let rel = exact.sub(&fd).norm_inf() / exact.norm_inf().max(1.0);
                assert!(rel <= 1e-6, "{kind}: {rel:.3e}");
            }
        }
    }

    #[test]
    fn scale_factor_specs_parse_and_roundtrip() {
        assert_eq!(
            "zero".parse::<ScaleFactorSpec>().unwrap(),
            ScaleFactorSpec::Zero
        );
        assert_eq!(
            "const:0.3".parse::<ScaleFactorSpec>().unwrap(),
            ScaleFactorSpec::Const(0.3)
        );
        assert_eq!(
            "power:2".parse::<ScaleFactorSpec>().unwrap(),
            ScaleFactorSpec::Power(2.0)
        );
        assert_eq!(ScaleFactorSpec::Const(0.3).to_string(), "const:0.3");
        assert!("cubic:1".parse::<ScaleFactorSpec>().is_err());
        assert!("const:abc".parse::<ScaleFactorSpec>().is_err());
    }

    #[test]
    fn scale_factor_evaluation_and_domains() {
        let zero = ScaleFactor::zero();
        assert_eq!(zero.eval_chart(&[0.5, 0.0]).unwrap(), 0.0);
        let c = ScaleFactor::constant(0.3);
        assert_eq!(c.eval_chart(&[-5.0, 2.0]).unwrap(), 0.3);
        let p = ScaleFactor::power(2.0);
        assert!((p.eval_chart(&[2.0, 0.0]).unwrap() - 2.0 * 2.0f64.ln()).abs() < 1e-15);
        assert!(matches!(
            p.eval_chart(&[-1.0, 0.0]),
            Err(Error::OutOfDomain)
        ));
    }

    #[test]
    fn flrw_restriction_matches_the_scale_factor_at_chart_points() {
        let space = build_flrw(ScaleFactor::power(2.0), 2, 1.0).unwrap();
        for trial in 0..200u64 {
            let mut rng = trial_rng(107, trial);
            let mut x = normal_vec(&mut rng, 2);
            x[0] = x[0].abs() + 0.05;
            if !space.base_chart().contains(&x) {
                continue;
            }
            let p = space.base_chart().point(&x).unwrap();
            let l_val = space.deformation().log_factor().eval(p.point()).unwrap();
            let a_val = space.scale_factor().eval_chart(&x).unwrap();
            assert!((l_val - a_val).abs() <= 1e-12, "restriction residual");
        }
    }

    #[test]
    fn flrw_log_factor_is_degree_zero() {
        let space = build_flrw(ScaleFactor::power(1.5), 2, 1.0).unwrap();
        let residual = check_homogeneity(space.deformation().log_factor(), 1000, 17).unwrap();
        assert!(residual <= 1e-13, "extension homogeneity {residual:.3e}");
    }

    #[test]
    fn trivial_scale_factors_reproduce_the_base_slice() {
        let space = build_flrw(ScaleFactor::zero(), 2, 1.0).unwrap();
        let x = [0.4, -0.7];
        let p = space.base_chart().point(&x).unwrap();
        // a = 0: W = Sigma and k = f pointwise.
        let q = space.deformation().apply(&p).unwrap();
        assert!(q.point().sub(p.point()).norm_inf() <= 1e-15);
        assert_eq!(
            space.k().eval(p.point()).unwrap(),
            space.base().defining_fn().eval(p.point()).unwrap()
        );
        // a = c: every point of W is e^c times a point of Sigma.
        let rescaled = build_flrw(ScaleFactor::constant(0.5), 2, 1.0).unwrap();
        let qc = rescaled.deformation().apply(&p).unwrap();
        let expected = p.point().scale(0.5f64.exp());
        assert!(qc.point().sub(&expected).norm_inf() <= 1e-14);
    }

    #[test]
    fn metric_residual_is_zero_for_constant_factors_and_small_generally() {
        let space0 = build_flrw(ScaleFactor::zero(), 2, 1.0).unwrap();
        assert_eq!(space0.metric_residual(&[0.3, 0.1]).unwrap(), 0.0);

        let spacec = build_flrw(ScaleFactor::constant(0.3), 2, 1.0).unwrap();
        assert!(spacec.metric_residual(&[0.3, 0.1]).unwrap() <= 1e-12);

        let spacep = build_flrw(ScaleFactor::power(2.0), 3, 1.0).unwrap();
        let mut checked = 0;
        for trial in 0..200u64 {
            let mut rng = trial_rng(109, trial);
            let mut x = normal_vec(&mut rng, 3);
            x[0] = x[0].abs() + 0.05;
            if !spacep.base_chart().contains(&x) {
                continue;
            }
            let r = spacep.metric_residual(&x).unwrap();
            assert!(r <= 1e-9, "residual {r:.3e} at {x:?}");
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn constant_rescaling_scales_the_curvature() {
        let c = 0.3;
        let space = build_flrw(ScaleFactor::constant(c), 2, 1.0).unwrap();
        let chart = space.w_chart();
        let r = scalar_curvature(&chart, &[0.0, 0.0]).unwrap();
        let expected = (-2.0 * c).exp() * (-2.0);
        assert!(
            (r - expected).abs() <= 1e-2 * expected.abs(),
            "R = {r}, expected {expected}"
        );
    }

    #[test]
    fn osculating_classification_of_the_standard_slices() {
        let n = 2;
        // De Sitter: k linear, its own osculating slice.
        let ds = standard_slice(SliceKind::DeSitter, n, 1.0).unwrap();
        let y = AmbientVector::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let p = SlicePoint::new(y, ds.defining_fn().clone()).unwrap();
        let result = osculating_slice(ds.defining_fn(), &p).unwrap();
        assert_eq!(result.classification(), SliceClass::DeSitter);
        assert_eq!(result.norm_sq(), 1.0);
        assert_eq!(result.gradient().coords(), &[0.0, 0.0, 0.0, 1.0]);

        // Anti-de Sitter point (0, b, 1, sqrt(1 + b^2)): on the cone since
        // C = -b^2 - 1 + (1 + b^2) = 0, and f_AdS = H y^2 = 1.
        let ads = standard_slice(SliceKind::AntiDeSitter, n, 1.0).unwrap();
        let b = 0.4f64;
        let y = AmbientVector::new(vec![0.0, b, 1.0, (1.0 + b * b).sqrt()]).unwrap();
        let p = SlicePoint::new(y, ads.defining_fn().clone()).unwrap();
        let result = osculating_slice(ads.defining_fn(), &p).unwrap();
        assert_eq!(result.classification(), SliceClass::AntiDeSitter);
        assert_eq!(result.norm_sq(), -1.0);

        // Null slice point: x = 0 chart point (0, 0, 1/H, 1/H).
        let null = standard_slice(SliceKind::MinkowskiNull, n, 1.0).unwrap();
        let y = AmbientVector::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let p = SlicePoint::new(y, null.defining_fn().clone()).unwrap();
        let result = osculating_slice(null.defining_fn(), &p).unwrap();
        assert_eq!(result.classification(), SliceClass::Null);
        assert_eq!(result.norm_sq(), 0.0);
    }

    #[test]
    fn osculating_slice_of_a_linear_function_is_itself() {
        let ds = standard_slice(SliceKind::DeSitter, 3, 2.0).unwrap();
        let chart = ds_graph_chart(3, 2.0, 1.0).unwrap();
        let p = chart.point(&[0.2, -0.1, 0.3]).unwrap();
        let result = osculating_slice(ds.defining_fn(), &p).unwrap();
        assert_eq!(result.norm_sq(), 4.0);
        for trial in 0..50u64 {
            let mut rng = trial_rng(113, trial);
            let probe =
                AmbientVector::new(normal_vec(&mut rng, 5)).unwrap();
            let lhs = result.f_local().eval(&probe).unwrap();
            let rhs = ds.defining_fn().eval(&probe).unwrap();
            assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn osculating_f_local_passes_through_the_base_point() {
        let space = build_flrw(ScaleFactor::power(2.0), 2, 1.0).unwrap();
        let mut checked = 0;
        for trial in 0..200u64 {
            let mut rng = trial_rng(127, trial);
            // Moderate window: away from the x0 -> 0 blow-up of the power
            // factor, where the gradient of k stays O(10) and the exact
            // linearity of f_local is visible at 1e-14.
            let mut x: Vec<f64> = normal_vec(&mut rng, 2)
                .iter()
                .map(|v| v.clamp(-2.0, 2.0))
                .collect();
            x[0] = 0.3 + x[0].abs();
            if !space.base_chart().contains(&x) {
                continue;
            }
            let p = space.base_chart().point(&x).unwrap();
            let y_o = space.deformation().apply(&p).unwrap();
            let result = osculating_slice(space.k(), &y_o).unwrap();
            // Euler identity: f_local(y_o) = dk(y_o) = k(y_o) = 1.
            let value = result.f_local().eval(y_o.point()).unwrap();
            assert!((value - 1.0).abs() <= 1e-10, "f_local(y_o) = {value}");
            assert!(check_homogeneity(result.f_local(), 50, trial).unwrap() <= 1e-14);
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn classification_is_ray_data_only() {
        let space = build_flrw(ScaleFactor::power(2.0), 2, 1.0).unwrap();
        let x = [0.8, 0.2];
        let p = space.base_chart().point(&x).unwrap();
        let y_o = space.deformation().apply(&p).unwrap();
        let direct = osculating_slice(space.k(), &y_o).unwrap();
        let reprojected = ray_project(y_o.point(), space.k()).unwrap();
        let again = osculating_slice(space.k(), &reprojected).unwrap();
        assert_eq!(direct.classification(), again.classification());
        assert!((direct.norm_sq() - again.norm_sq()).abs() <= 1e-12);
    }

    #[test]
    fn strongly_varying_scale_factor_mixes_classifications() {
        use crate::homogeneous::DomainPredicate;
        // a(x) = 2 x^1 tips the gradient norm of k across zero:
        // K^2 = e^{-2l} [(1 + 2 x^1)^2 - 4] at H = 1 chart points.
        let a = ScaleFactor::custom(
            "linear-in-x1",
            |xd: &[Dual]| Ok(xd[1].scale(2.0)),
            |_| true,
        );
        let space = build_flrw(a, 2, 1.0).unwrap();
        // Independent sign oracle: central finite differences of k.
        let k = space.k().clone();
        let k_for_fd = k.clone();
        let fd_oracle = HomogeneousFn::finite_difference(
            k.sig(),
            1.0,
            move |y: &[f64]| {
                k_for_fd
                    .eval(&AmbientVector::new(y.to_vec()).expect("finite stencil point"))
                    .expect("stencil point stays in the domain")
            },
            DomainPredicate::new({
                let k = k.clone();
                move |y: &[f64]| {
                    AmbientVector::new(y.to_vec())
                        .map(|y| k.contains(&y))
                        .unwrap_or(false)
                }
            }),
        );
        let mut seen = Vec::new();
        for x in [[0.0, -0.2], [0.0, 0.8]] {
            let p = space.base_chart().point(&x).unwrap();
            let y_o = space.deformation().apply(&p).unwrap();
            let result = osculating_slice(space.k(), &y_o).unwrap();
            let sig = k.sig();
            let fd_grad = sig.raise(&fd_oracle.differential(y_o.point()).unwrap()).unwrap();
            let fd_norm_sq = sig.inner(&fd_grad, &fd_grad).unwrap();
            assert_eq!(
                result.norm_sq().signum(),
                fd_norm_sq.signum(),
                "sign disagrees with the finite-difference oracle at {x:?}"
            );
            seen.push(result.classification());
        }
        assert_eq!(seen[0], SliceClass::AntiDeSitter);
        assert_eq!(seen[1], SliceClass::DeSitter);
    }

    #[test]
    fn osculating_result_serializes_classification_and_norm() {
        let ds = standard_slice(SliceKind::DeSitter, 2, 1.0).unwrap();
        let y = AmbientVector::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let p = SlicePoint::new(y, ds.defining_fn().clone()).unwrap();
        let result = osculating_slice(ds.defining_fn(), &p).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&result.to_json()).unwrap();
        assert_eq!(parsed["classification"], "deSitter");
        assert_eq!(parsed["normSq"].as_f64().unwrap(), 1.0);
        assert_eq!(parsed["K"].as_array().unwrap().len(), 4);
    }
}
