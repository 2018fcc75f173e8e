//! Command-line front end: configured verification campaigns with JSON/CSV
//! reports.
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 usage error, 3 domain or runtime error. Reports are byte-identical
//! for identical flags, serial or parallel.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::curvature::curvature_grid;
use crate::embedding::deformation_campaign;
use crate::error::{Error, Result};
use crate::flrw::{build_flrw, osculating_slice, ScaleFactor, ScaleFactorSpec};
use crate::group::conformal_campaign;
use crate::report::{fmt_f64, fmt_f64_array, VerificationReport};
use crate::slice::{ds_graph_chart, minkowski_null_chart, SliceChart};
use crate::tol;

/// Environment variable consulted for the default seed; flags win.
pub const SEED_ENV_VAR: &str = "NULLCONE_SEED";

/// Fixed lattice for curvature sampling: [-0.2, 0.2]^n, three points per
/// axis, inside every supported chart domain for the tested scales.
const GRID_RADIUS: f64 = 0.2;
const GRID_PER_AXIS: usize = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nullcone",
    version,
    about = "Verification campaigns for conformally flat null-cone slice geometries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify the Weyl relation between the base and deformed slice metrics
    VerifyTheorem(CommonArgs),
    /// Verify the conformal factor of the group action on the deformed slice
    VerifyGroup {
        #[command(flatten)]
        common: CommonArgs,
        /// Frobenius sampling radius for algebra elements
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
    },
    /// Sample scalar curvature on a chart grid
    Curvature {
        #[command(flatten)]
        common: CommonArgs,
        /// Chart to sample
        #[arg(long, value_enum, default_value_t = ChartChoice::Ds)]
        chart: ChartChoice,
    },
    /// Classify the osculating slice at a point of the deformed space
    Osculate {
        #[command(flatten)]
        common: CommonArgs,
        /// Base-chart coordinates of the point, comma-separated
        #[arg(long, default_value = "")]
        point: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Slice dimension n (at least 2)
    #[arg(long = "dim", default_value_t = 2)]
    pub dim: usize,
    /// Curvature scale H (positive)
    #[arg(long = "hubble", default_value_t = 1.0)]
    pub hubble: f64,
    /// Scale factor: zero | const:<c> | power:<p>
    #[arg(long = "scale-factor", default_value = "zero")]
    pub scale_factor: String,
    /// Number of campaign trials
    #[arg(long = "trials", default_value_t = 1000)]
    pub trials: u64,
    /// Campaign seed; defaults to NULLCONE_SEED, then 0
    #[arg(long = "seed")]
    pub seed: Option<u64>,
    /// Residual tolerance for campaign verdicts
    #[arg(long = "tol", default_value_t = tol::CAMPAIGN_DEFAULT)]
    pub tolerance: f64,
    /// Report format
    #[arg(long = "format", value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Output path; standard output when omitted
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
    /// Worker threads for campaigns (0 = library default)
    #[arg(long = "threads", default_value_t = 0)]
    pub threads: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartChoice {
    /// De Sitter graph chart (upper sheet)
    Ds,
    /// Flat null-slice chart
    Null,
    /// Pushed chart of the deformed space (zero/const scale factors)
    Flrw,
}

/// Validated run configuration; every field is checked before any
/// computation starts.
#[derive(Clone)]
pub struct RunConfig {
    pub n: usize,
    pub hubble: f64,
    pub scale_factor: ScaleFactor,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        if args.dim < 2 {
            return Err(Error::InvalidSpec(format!(
                "--dim must be at least 2, got {}",
                args.dim
            )));
        }
        if !args.hubble.is_finite() || args.hubble <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "--hubble must be positive and finite, got {}",
                args.hubble
            )));
        }
        if args.trials == 0 {
            return Err(Error::InvalidSpec("--trials must be at least 1".into()));
        }
        if !args.tolerance.is_finite() || args.tolerance <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "--tol must be positive and finite, got {}",
                args.tolerance
            )));
        }
        let seed = match args.seed {
            Some(seed) => seed,
            None => match std::env::var(SEED_ENV_VAR) {
                Ok(raw) => raw.parse().map_err(|_| {
                    Error::InvalidSpec(format!("{SEED_ENV_VAR} must be a u64, got '{raw}'"))
                })?,
                Err(_) => 0,
            },
        };
        Ok(Self {
            n: args.dim,
            hubble: args.hubble,
            scale_factor: ScaleFactor::parse(&args.scale_factor)?,
            trials: args.trials,
            seed,
            tolerance: args.tolerance,
            format: args.format,
            out: args.out.clone(),
            threads: args.threads,
        })
    }
}

pub fn cmd_verify_theorem(cfg: &RunConfig) -> Result<VerificationReport> {
    let space = build_flrw(cfg.scale_factor.clone(), cfg.n, cfg.hubble)?;
    let mut report = deformation_campaign(
        space.deformation(),
        space.base_chart(),
        cfg.trials,
        cfg.seed,
        cfg.tolerance,
    )?;
    report.campaign = "verify-theorem".into();
    Ok(report)
}

pub fn cmd_verify_group(cfg: &RunConfig, rho: f64) -> Result<VerificationReport> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::InvalidSpec(format!(
            "--rho must be non-negative and finite, got {rho}"
        )));
    }
    let space = build_flrw(cfg.scale_factor.clone(), cfg.n, cfg.hubble)?;
    let mut report = conformal_campaign(
        space.deformation(),
        space.base_chart(),
        cfg.trials,
        cfg.seed,
        rho,
        cfg.tolerance,
    )?;
    report.campaign = "verify-group".into();
    Ok(report)
}

/// Curvature samples over the fixed grid plus the analytic reference value
/// for the chosen chart.
pub struct CurvatureReport {
    pub chart: String,
    pub n: usize,
    pub hubble: f64,
    pub expected: f64,
    pub max_abs_deviation: f64,
    pub samples: Vec<(Vec<f64>, f64)>,
}

impl CurvatureReport {
    pub fn to_json(&self) -> String {
        let mut body = format!(
            "{{\"campaign\":\"curvature\",\"chart\":\"{}\",\"n\":{},\"hubble\":{},\"expected\":{},\"max_abs_deviation\":{},\"samples\":[",
            self.chart,
            self.n,
            fmt_f64(self.hubble),
            fmt_f64(self.expected),
            fmt_f64(self.max_abs_deviation),
        );
        for (i, (x, r)) in self.samples.iter().enumerate() {
            if i > 0 {
                body.push(',');
            }
            body.push_str(&format!(
                "{{\"x\":{},\"ricci_scalar\":{}}}",
                fmt_f64_array(x),
                fmt_f64(*r)
            ));
        }
        body.push_str("]}");
        body
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            out.push_str(&format!("x{i},"));
        }
        out.push_str("ricci_scalar\n");
        for (x, r) in &self.samples {
            for v in x {
                out.push_str(&fmt_f64(*v));
                out.push(',');
            }
            out.push_str(&fmt_f64(*r));
            out.push('\n');
        }
        out
    }
}

pub fn cmd_curvature(cfg: &RunConfig, choice: ChartChoice) -> Result<CurvatureReport> {
    let analytic_ds = -((cfg.n * (cfg.n - 1)) as f64) * cfg.hubble * cfg.hubble;
    let (chart, expected, label): (SliceChart, f64, &str) = match choice {
        ChartChoice::Ds => (ds_graph_chart(cfg.n, cfg.hubble, 1.0)?, analytic_ds, "ds"),
        ChartChoice::Null => (minkowski_null_chart(cfg.n, cfg.hubble)?, 0.0, "null"),
        ChartChoice::Flrw => {
            let c = match cfg.scale_factor.spec() {
                Some(ScaleFactorSpec::Zero) => 0.0,
                Some(ScaleFactorSpec::Const(c)) => c,
                _ => {
                    return Err(Error::InvalidSpec(
                        "--chart flrw needs a zero or const scale factor for the analytic reference"
                            .into(),
                    ))
                }
            };
            let space = build_flrw(cfg.scale_factor.clone(), cfg.n, cfg.hubble)?;
            (space.w_chart(), (-2.0 * c).exp() * analytic_ds, "flrw")
        }
    };
    let samples = curvature_grid(&chart, GRID_RADIUS, GRID_PER_AXIS)?;
    let max_abs_deviation = samples
        .iter()
        .map(|(_, r)| (r - expected).abs())
        .fold(0.0, f64::max);
    Ok(CurvatureReport {
        chart: label.into(),
        n: cfg.n,
        hubble: cfg.hubble,
        expected,
        max_abs_deviation,
        samples,
    })
}

fn parse_point(raw: &str, n: usize) -> Result<Vec<f64>> {
    if raw.trim().is_empty() {
        return Ok(vec![0.0; n]);
    }
    let coords: Vec<f64> = raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("bad coordinate '{s}' in --point")))
        })
        .collect::<Result<_>>()?;
    if coords.len() != n {
        return Err(Error::InvalidSpec(format!(
            "--point needs {n} coordinates, got {}",
            coords.len()
        )));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSpec("--point coordinates must be finite".into()));
    }
    Ok(coords)
}

/// Osculating classification at the image on W of the given base-chart
/// point. A null-band classification is a reported outcome, not an error.
pub fn cmd_osculate(cfg: &RunConfig, point: &str) -> Result<String> {
    let coords = parse_point(point, cfg.n)?;
    let space = build_flrw(cfg.scale_factor.clone(), cfg.n, cfg.hubble)?;
    let base = space.base_chart().point(&coords)?;
    let y_o = space.deformation().apply(&base)?;
    let result = osculating_slice(space.k(), &y_o)?;
    Ok(format!(
        "{{\"campaign\":\"osculate\",\"x\":{},\"point\":{},\"result\":{}}}",
        fmt_f64_array(&coords),
        fmt_f64_array(y_o.point().coords()),
        result.to_json()
    ))
}

fn write_output(out: &Option<PathBuf>, payload: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, payload)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(payload.as_bytes())?;
        }
    }
    Ok(())
}

fn with_threads<T: Send>(threads: usize, work: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if threads == 0 {
        work()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidSpec(format!("cannot build thread pool: {e}")))?;
        pool.install(work)
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidSpec(_) => 2,
        _ => 3,
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::VerifyTheorem(args) => {
            let cfg = RunConfig::from_args(&args)?;
            require_json(cfg.format)?;
            let report = with_threads(cfg.threads, || cmd_verify_theorem(&cfg))?;
            write_output(&cfg.out, &(report.cli_json() + "\n"))?;
            eprintln!(
                "verify-theorem: {} trials in {:.3}s, max residual {:.3e}",
                report.trials, report.wall_time_seconds, report.max_residual
            );
            Ok(if report.failures == 0 { 0 } else { 1 })
        }
        Command::VerifyGroup { common, rho } => {
            let cfg = RunConfig::from_args(&common)?;
            require_json(cfg.format)?;
            let report = with_threads(cfg.threads, || cmd_verify_group(&cfg, rho))?;
            write_output(&cfg.out, &(report.cli_json() + "\n"))?;
            eprintln!(
                "verify-group: {} trials in {:.3}s, max residual {:.3e}, {} boundary rejections",
                report.trials, report.wall_time_seconds, report.max_residual, report.rejections
            );
            Ok(if report.failures == 0 { 0 } else { 1 })
        }
        Command::Curvature { common, chart } => {
            let cfg = RunConfig::from_args(&common)?;
            let report = with_threads(cfg.threads, || cmd_curvature(&cfg, chart))?;
            let payload = match cfg.format {
                OutputFormat::Json => report.to_json() + "\n",
                OutputFormat::Csv => report.to_csv(),
            };
            write_output(&cfg.out, &payload)?;
            eprintln!(
                "curvature: {} samples, max |R - expected| = {:.3e}",
                report.samples.len(),
                report.max_abs_deviation
            );
            Ok(0)
        }
        Command::Osculate { common, point } => {
            let cfg = RunConfig::from_args(&common)?;
            require_json(cfg.format)?;
            let payload = cmd_osculate(&cfg, &point)?;
            write_output(&cfg.out, &(payload + "\n"))?;
            Ok(0)
        }
    }
}

fn require_json(format: OutputFormat) -> Result<()> {
    if format == OutputFormat::Csv {
        return Err(Error::InvalidSpec(
            "CSV covers tabular samples only; this report is JSON".into(),
        ));
    }
    Ok(())
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(overrides: impl FnOnce(&mut CommonArgs)) -> CommonArgs {
        let mut a = CommonArgs {
            dim: 2,
            hubble: 1.0,
            scale_factor: "zero".into(),
            trials: 50,
            seed: Some(1),
            tolerance: tol::CAMPAIGN_DEFAULT,
            format: OutputFormat::Json,
            out: None,
            threads: 0,
        };
        overrides(&mut a);
        a
    }

    #[test]
    fn config_validation_rejects_bad_flags() {
        assert!(RunConfig::from_args(&args(|a| a.dim = 1)).is_err());
        assert!(RunConfig::from_args(&args(|a| a.hubble = 0.0)).is_err());
        assert!(RunConfig::from_args(&args(|a| a.trials = 0)).is_err());
        assert!(RunConfig::from_args(&args(|a| a.tolerance = -1.0)).is_err());
        assert!(RunConfig::from_args(&args(|a| a.scale_factor = "bogus".into())).is_err());
        assert!(RunConfig::from_args(&args(|_| {})).is_ok());
    }

    #[test]
    fn theorem_command_passes_on_trivial_factor() {
        let cfg = RunConfig::from_args(&args(|_| {})).unwrap();
        let report = cmd_verify_theorem(&cfg).unwrap();
        assert_eq!(report.failures, 0);
        assert_eq!(report.max_residual, 0.0);
        assert_eq!(report.campaign, "verify-theorem");
    }

    #[test]
    fn group_command_reports_rejections_separately() {
        let cfg = RunConfig::from_args(&args(|a| a.trials = 100)).unwrap();
        let report = cmd_verify_group(&cfg, 0.0).unwrap();
        assert_eq!(report.failures, 0);
        assert_eq!(report.rejections, 0);
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn curvature_command_matches_the_analytic_anchor() {
        let cfg = RunConfig::from_args(&args(|_| {})).unwrap();
        let report = cmd_curvature(&cfg, ChartChoice::Ds).unwrap();
        assert_eq!(report.expected, -2.0);
        assert!(report.max_abs_deviation <= 1e-3);
        assert_eq!(report.samples.len(), 9);

        let null = cmd_curvature(&cfg, ChartChoice::Null).unwrap();
        assert_eq!(null.expected, 0.0);
        assert!(null.max_abs_deviation <= 1e-4);
    }

    #[test]
    fn flrw_curvature_needs_a_constant_factor() {
        let cfg = RunConfig::from_args(&args(|a| a.scale_factor = "power:2".into())).unwrap();
        assert!(matches!(
            cmd_curvature(&cfg, ChartChoice::Flrw),
            Err(Error::InvalidSpec(_))
        ));
        let cfg = RunConfig::from_args(&args(|a| a.scale_factor = "const:0.3".into())).unwrap();
        let report = cmd_curvature(&cfg, ChartChoice::Flrw).unwrap();
        let expected = (-0.6f64).exp() * -2.0;
        assert!((report.expected - expected).abs() <= 1e-15);
        assert!(report.max_abs_deviation <= 1e-2 * expected.abs());
    }

    #[test]
    fn osculate_command_classifies_and_serializes() {
        let cfg = RunConfig::from_args(&args(|_| {})).unwrap();
        let json = cmd_osculate(&cfg, "").unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["result"]["classification"], "deSitter");
        assert_eq!(parsed["result"]["normSq"].as_f64().unwrap(), 1.0);

        assert!(cmd_osculate(&cfg, "0.1,0.2").is_ok());
        assert!(cmd_osculate(&cfg, "0.1").is_err());
        assert!(cmd_osculate(&cfg, "0.1,0.2,0.3").is_err());
        assert!(cmd_osculate(&cfg, "abc,0").is_err());
    }

    #[test]
    fn reports_are_identical_across_thread_counts() {
        let cfg = RunConfig::from_args(&args(|a| a.trials = 200)).unwrap();
        let serial = with_threads(1, || cmd_verify_theorem(&cfg)).unwrap();
        let parallel = with_threads(4, || cmd_verify_theorem(&cfg)).unwrap();
        assert_eq!(serial.cli_json(), parallel.cli_json());
    }
}
