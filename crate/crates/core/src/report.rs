//! Verification reports and deterministic numeric formatting.
//!
//! All floating-point output is printed with 17 significant digits, which
//! round-trips f64 exactly; reports with identical inputs are byte-identical
//! regardless of thread count. Wall time is tracked for logging but kept
//! out of the serialized report for that reason.

/// 17-significant-digit scientific form; round-trip exact for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_f64_array(vals: &[f64]) -> String {
    let mut out = String::from("[");
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f64(*v));
    }
    out.push(']');
    out
}

/// Aggregated residual statistics from a randomized property campaign.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub campaign: String,
    pub trials: u64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub failures: u64,
    /// Conformal-boundary rejections (group campaigns); zero elsewhere.
    pub rejections: u64,
    pub tolerance: f64,
    pub seed: u64,
    /// Not serialized: see module docs.
    pub wall_time_seconds: f64,
}

impl VerificationReport {
    /// The minimal report form used by the embedding layer.
    pub fn core_json(&self) -> String {
        format!(
            "{{\"trials\":{},\"max_residual\":{},\"mean_residual\":{},\"failures\":{},\"tolerance\":{},\"seed\":{}}}",
            self.trials,
            fmt_f64(self.max_residual),
            fmt_f64(self.mean_residual),
            self.failures,
            fmt_f64(self.tolerance),
            self.seed
        )
    }

    /// The CLI report form: adds the campaign name and rejection count.
    pub fn cli_json(&self) -> String {
        format!(
            "{{\"campaign\":{:?},\"trials\":{},\"max_residual\":{},\"mean_residual\":{},\"failures\":{},\"rejections\":{},\"tolerance\":{},\"seed\":{}}}",
            self.campaign,
            self.trials,
            fmt_f64(self.max_residual),
            fmt_f64(self.mean_residual),
            self.failures,
            self.rejections,
            fmt_f64(self.tolerance),
            self.seed
        )
    }
}
