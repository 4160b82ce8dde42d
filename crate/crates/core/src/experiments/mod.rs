//! Monte Carlo harness: consistency, convergence-rate, localized
//! empirical-process and occupation-time experiments.
//!
//! Every run is a deterministic function of its [`ScenarioConfig`]: each
//! replication draws from random streams derived from
//! `(seed, sample size, replication index)`, replications execute as
//! independent work units (in parallel when a thread pool is available),
//! and the report is assembled in `(n, rep)` order — so serial and parallel
//! schedules produce byte-identical reports.
//!
//! Errors are summarized by medians across replications rather than means:
//! occupation counts of null recurrent chains are heavy-tailed, and the
//! claims under test are order-of-magnitude statements about quantiles.

mod configfile;
mod report;
pub mod stats;

pub use configfile::{parse_config_str, ExperimentFile, OutputFormat};
pub use report::{
    read_report, write_report, ExperimentKind, ExperimentReport, NSummary, RepRecord,
    ReportFormat, Summary,
};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::chains::{occupation_ratio_samples, mittag_leffler_moment, ChainError, ChainSpec, Recurrence};
use crate::estimator::{EstimatorError, LocalizedEcdf, LocalizedFit, TimeSeriesSample};
use crate::rng::{derive_seed, stream_rng};
use crate::window::Window;

/// Acceptance half-width around the expected log-log slope.
pub const RATE_SLOPE_BAND: f64 = 0.08;
/// Acceptance half-width around the expected occupation moment ratio.
pub const MOMENT_RATIO_BAND: f64 = 0.1;
/// Largest tolerated fraction of empty-window replications.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.05;

const CHAIN_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("report parse: {0}")]
    ReportParse(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Built-in strictly decreasing link functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkFn {
    /// `-x`
    NegIdentity,
    /// `-atan(x)`
    NegArctan,
    /// `exp(-x)`
    ExpDecay,
}

impl LinkFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::NegIdentity => -x,
            Self::NegArctan => -x.atan(),
            Self::ExpDecay => (-x).exp(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NegIdentity => "neg_identity",
            Self::NegArctan => "neg_arctan",
            Self::ExpDecay => "exp_decay",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "neg_identity" => Some(Self::NegIdentity),
            "neg_arctan" => Some(Self::NegArctan),
            "exp_decay" => Some(Self::ExpDecay),
            _ => None,
        }
    }
}

/// Everything a Monte Carlo run needs: the chain, the window, the link, the
/// noise level, the sample-size grid, the replication count and the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub chain: ChainSpec,
    pub window: Window<f64>,
    pub link: LinkFn,
    pub noise_sd: f64,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !self.noise_sd.is_finite() || self.noise_sd < 0.0 {
            return Err(ExperimentError::Config(
                "sigma must be finite and non-negative".into(),
            ));
        }
        if self.n_grid.is_empty() {
            return Err(ExperimentError::Config("n_grid must be nonempty".into()));
        }
        if self.n_grid.iter().any(|&n| n == 0) {
            return Err(ExperimentError::Config("n_grid entries must be >= 1".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(ExperimentError::Config(
                "n_grid must be strictly increasing".into(),
            ));
        }
        if self.reps == 0 {
            return Err(ExperimentError::Config("reps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Draw one synthetic sample: the chain path plus independent Gaussian noise
/// through the link. Deterministic per `(config.seed, n, rep)`.
pub fn synthesize(cfg: &ScenarioConfig, n: usize, rep: u64) -> TimeSeriesSample<f64> {
    let chain_seed = derive_seed(cfg.seed, &[CHAIN_STREAM, n as u64, rep]);
    let xs = cfg.chain.simulate(n, chain_seed);
    let zs: Vec<f64> = if cfg.noise_sd == 0.0 {
        xs.iter().map(|&x| cfg.link.eval(x)).collect()
    } else {
        let mut noise = stream_rng(cfg.seed, &[NOISE_STREAM, n as u64, rep]);
        xs.iter()
            .map(|&x| {
                let w: f64 = noise.sample(StandardNormal);
                cfg.link.eval(x) + cfg.noise_sd * w
            })
            .collect()
    };
    TimeSeriesSample::new(xs, zs).expect("synthesized samples are finite and nonempty")
}

/// Exact supremum of `|F_n - F|` over the real line, for the continuous
/// invariant CDFs of the built-in chains: the supremum is attained at an
/// ECDF knot, approached from the left or the right.
pub fn sup_deviation(ecdf: &LocalizedEcdf<f64>, spec: &ChainSpec, w: &Window<f64>) -> f64 {
    let step = ecdf.step_fn();
    let mut sup: f64 = 0.0;
    let mut prev_h = 0.0;
    for (&y, &h) in step.knots().iter().zip(step.heights()) {
        let f = spec.invariant_cdf(w, y);
        sup = sup.max((h - f).abs()).max((f - prev_h).abs());
        prev_h = h;
    }
    sup
}

fn measure_replications(cfg: &ScenarioConfig) -> (Vec<RepRecord>, Vec<(u64, u64)>) {
    let f0_x0 = cfg.link.eval(cfg.window.x0());
    let jobs: Vec<(usize, u64)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.reps as u64).map(move |rep| (n, rep)))
        .collect();
    let outcomes: Vec<Option<RepRecord>> = jobs
        .par_iter()
        .map(|&(n, rep)| {
            let sample = synthesize(cfg, n, rep);
            match LocalizedFit::fit(&sample, &cfg.window) {
                Err(EstimatorError::EmptyWindow) => None,
                Err(e) => panic!("unexpected fit failure: {e}"),
                Ok(fit) => {
                    let estimate = fit.value_at(cfg.window.x0()).expect("x0 lies in the window");
                    let inverse = fit.inverse(f0_x0).value;
                    Some(RepRecord {
                        n: n as u64,
                        rep,
                        error: (estimate - f0_x0).abs(),
                        inv_error: (inverse - cfg.window.x0()).abs(),
                        sup_dev: sup_deviation(fit.ecdf(), &cfg.chain, &cfg.window),
                        tn: fit.tn() as u64,
                        u_n: cfg.chain.u_of_n(n),
                    })
                }
            }
        })
        .collect();
    let mut records = Vec::new();
    let mut excluded = Vec::new();
    for ((n, rep), outcome) in jobs.into_iter().zip(outcomes) {
        match outcome {
            Some(r) => records.push(r),
            None => excluded.push((n as u64, rep)),
        }
    }
    (records, excluded)
}

fn per_n_summaries(cfg: &ScenarioConfig, records: &[RepRecord], excluded: &[(u64, u64)]) -> Vec<NSummary> {
    cfg.n_grid
        .iter()
        .map(|&n| {
            let n = n as u64;
            let rows: Vec<&RepRecord> = records.iter().filter(|r| r.n == n).collect();
            let u_n = cfg.chain.u_of_n(n as usize);
            let col = |f: &dyn Fn(&RepRecord) -> f64| -> Vec<f64> { rows.iter().map(|r| f(r)).collect() };
            NSummary {
                n,
                u_n,
                reps_used: rows.len() as u64,
                excluded: excluded.iter().filter(|(en, _)| *en == n).count() as u64,
                median_error: stats::median(&col(&|r| r.error)),
                median_inv_error: stats::median(&col(&|r| r.inv_error)),
                median_sup_dev: stats::median(&col(&|r| r.sup_dev)),
                median_scaled_error: stats::median(&col(&|r| r.u_n.cbrt() * r.error)),
                median_tn_supdev_sq: stats::median(&col(&|r| r.tn as f64 * r.sup_dev * r.sup_dev)),
                moment_ratio: None,
            }
        })
        .collect()
}

fn exclusions_acceptable(cfg: &ScenarioConfig, excluded: usize, notes: &mut Vec<String>) -> bool {
    let total = cfg.n_grid.len() * cfg.reps;
    let ok = (excluded as f64) <= MAX_EXCLUDED_FRACTION * total as f64;
    if !ok {
        notes.push(format!(
            "excluded {excluded} of {total} replications (> {:.0}%)",
            MAX_EXCLUDED_FRACTION * 100.0
        ));
    }
    ok
}

fn strictly_decreasing(values: &[Option<f64>]) -> bool {
    values.iter().all(|v| v.is_some())
        && values
            .windows(2)
            .all(|w| w[0].unwrap() > w[1].unwrap())
}

/// Log-log regression of the median error on the sample size.
fn fit_loglog_slope(per_n: &[NSummary], notes: &mut Vec<String>) -> Option<(f64, f64)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in per_n {
        match s.median_error {
            Some(m) if m > 0.0 => {
                xs.push((s.n as f64).ln());
                ys.push(m.ln());
            }
            Some(_) => {
                notes.push(format!("degenerate zero median error at n={}", s.n));
                return None;
            }
            None => {
                notes.push(format!("no usable replications at n={}", s.n));
                return None;
            }
        }
    }
    let fitted = stats::ols_slope(&xs, &ys);
    if fitted.is_none() {
        notes.push("too few grid points for a slope".into());
    }
    fitted
}

/// Consistency experiment: the median estimation error must strictly
/// decrease along the sample-size grid.
pub fn run_consistency(cfg: &ScenarioConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    // A single-point single-replication run is allowed as an explicit
    // degenerate (one record, no slope); anything else needs a grid that can
    // actually show a trend.
    let degenerate = cfg.reps == 1 && cfg.n_grid.len() == 1;
    if !degenerate {
        if cfg.n_grid.len() < 3 {
            return Err(ExperimentError::Config(
                "consistency runs need an n_grid with at least 3 points".into(),
            ));
        }
        let span = *cfg.n_grid.last().unwrap() as f64 / cfg.n_grid[0] as f64;
        if span < 100.0 {
            return Err(ExperimentError::Config(
                "consistency runs need an n_grid spanning at least two decades".into(),
            ));
        }
    }
    let (records, excluded) = measure_replications(cfg);
    let per_n = per_n_summaries(cfg, &records, &excluded);
    let mut notes = Vec::new();
    let medians: Vec<Option<f64>> = per_n.iter().map(|s| s.median_error).collect();
    let decreasing = strictly_decreasing(&medians);
    if !decreasing {
        notes.push("median errors are not strictly decreasing".into());
    }
    let exclusion_ok = exclusions_acceptable(cfg, excluded.len(), &mut notes);
    let slope = fit_loglog_slope(&per_n, &mut Vec::new());
    let pass = decreasing && exclusion_ok;
    Ok(ExperimentReport {
        excluded: excluded.clone(),
        summary: Summary {
            kind: ExperimentKind::Consistency,
            per_n,
            slope: slope.map(|s| s.0),
            slope_se: slope.map(|s| s.1),
            slope_target: None,
            moment_ratio_target: None,
            pass,
            excluded_total: excluded.len() as u64,
            notes,
        },
        records,
    })
}

/// Rate experiment: the log-log slope of the median error must land within
/// [`RATE_SLOPE_BAND`] of `-1/3` (positive recurrent) or `-beta/3`
/// (null recurrent).
pub fn run_rate(cfg: &ScenarioConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    if cfg.n_grid.len() < 6 {
        return Err(ExperimentError::Config(
            "rate runs need a geometric n_grid with at least 6 points".into(),
        ));
    }
    if !cfg.n_grid.windows(2).all(|w| w[1] as f64 >= 1.2 * w[0] as f64) {
        return Err(ExperimentError::Config(
            "rate runs need geometric spacing (each step at least 1.2x)".into(),
        ));
    }
    let (records, excluded) = measure_replications(cfg);
    let per_n = per_n_summaries(cfg, &records, &excluded);
    let target = match cfg.chain.recurrence() {
        Recurrence::PositiveRecurrent => -1.0 / 3.0,
        Recurrence::BetaNull { beta } => -beta / 3.0,
    };
    let mut notes = Vec::new();
    let slope = fit_loglog_slope(&per_n, &mut notes);
    let in_band = slope.map_or(false, |(s, _)| (s - target).abs() <= RATE_SLOPE_BAND);
    if let Some((s, _)) = slope {
        if !in_band {
            notes.push(format!(
                "slope {s:.4} outside {target:.4} +- {RATE_SLOPE_BAND}"
            ));
        }
    }
    let exclusion_ok = exclusions_acceptable(cfg, excluded.len(), &mut notes);
    let pass = in_band && exclusion_ok;
    Ok(ExperimentReport {
        excluded: excluded.clone(),
        summary: Summary {
            kind: ExperimentKind::Rate,
            per_n,
            slope: slope.map(|s| s.0),
            slope_se: slope.map(|s| s.1),
            slope_target: Some(target),
            moment_ratio_target: None,
            pass,
            excluded_total: excluded.len() as u64,
            notes,
        },
        records,
    })
}

/// Localized empirical-process experiment: the median supremum deviation of
/// the windowed ECDF from the invariant CDF must strictly decrease in `n`.
pub fn run_gc(cfg: &ScenarioConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let (records, excluded) = measure_replications(cfg);
    let per_n = per_n_summaries(cfg, &records, &excluded);
    let mut notes = Vec::new();
    let medians: Vec<Option<f64>> = per_n.iter().map(|s| s.median_sup_dev).collect();
    let decreasing = strictly_decreasing(&medians);
    if !decreasing {
        notes.push("median sup deviations are not strictly decreasing".into());
    }
    let exclusion_ok = exclusions_acceptable(cfg, excluded.len(), &mut notes);
    let pass = decreasing && exclusion_ok;
    Ok(ExperimentReport {
        excluded: excluded.clone(),
        summary: Summary {
            kind: ExperimentKind::GlivenkoCantelli,
            per_n,
            slope: None,
            slope_se: None,
            slope_target: None,
            moment_ratio_target: None,
            pass,
            excluded_total: excluded.len() as u64,
            notes,
        },
        records,
    })
}

/// Occupation-time experiment: the scale-free moment ratio
/// `mean(T^2) / mean(T)^2` of `T = T_n(C) / u(n)` at the largest sample
/// size must match the limit-law prediction within [`MOMENT_RATIO_BAND`].
pub fn run_occupation(cfg: &ScenarioConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let target = match cfg.chain.recurrence() {
        Recurrence::BetaNull { beta } => {
            let m1 = mittag_leffler_moment(beta, 1);
            let m2 = mittag_leffler_moment(beta, 2);
            m2 / (m1 * m1)
        }
        // Almost-sure constant limit: the ratio degenerates to 1.
        Recurrence::PositiveRecurrent => 1.0,
    };
    let mut records = Vec::new();
    let mut per_n = Vec::new();
    let mut notes = Vec::new();
    let mut final_ratio = None;
    for &n in &cfg.n_grid {
        let u_n = cfg.chain.u_of_n(n);
        let samples = occupation_ratio_samples(&cfg.chain, &cfg.window, n, cfg.reps, cfg.seed);
        for (rep, &t) in samples.iter().enumerate() {
            records.push(RepRecord {
                n: n as u64,
                rep: rep as u64,
                error: 0.0,
                inv_error: 0.0,
                sup_dev: 0.0,
                tn: (t * u_n).round() as u64,
                u_n,
            });
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let mean_sq = samples.iter().map(|t| t * t).sum::<f64>() / samples.len() as f64;
        let ratio = if mean > 0.0 { mean_sq / (mean * mean) } else { f64::NAN };
        let ratio = if ratio.is_finite() { Some(ratio) } else { None };
        per_n.push(NSummary {
            n: n as u64,
            u_n,
            reps_used: samples.len() as u64,
            excluded: 0,
            median_error: None,
            median_inv_error: None,
            median_sup_dev: None,
            median_scaled_error: None,
            median_tn_supdev_sq: None,
            moment_ratio: ratio,
        });
        final_ratio = ratio;
    }
    let mut pass = final_ratio.map_or(false, |r| (r - target).abs() <= MOMENT_RATIO_BAND);
    if cfg.reps < 2 {
        notes.push("insufficient replications for a moment ratio".into());
        pass = false;
    } else if let Some(r) = final_ratio {
        if !pass {
            notes.push(format!(
                "moment ratio {r:.4} outside {target:.4} +- {MOMENT_RATIO_BAND}"
            ));
        }
    }
    Ok(ExperimentReport {
        records,
        excluded: Vec::new(),
        summary: Summary {
            kind: ExperimentKind::Occupation,
            per_n,
            slope: None,
            slope_se: None,
            slope_target: None,
            moment_ratio_target: Some(target),
            pass,
            excluded_total: 0,
            notes,
        },
    })
}

/// Dispatch an experiment by kind.
pub fn run_experiment(
    kind: ExperimentKind,
    cfg: &ScenarioConfig,
) -> Result<ExperimentReport, ExperimentError> {
    match kind {
        ExperimentKind::Consistency => run_consistency(cfg),
        ExperimentKind::Rate => run_rate(cfg),
        ExperimentKind::GlivenkoCantelli => run_gc(cfg),
        ExperimentKind::Occupation => run_occupation(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lazy_cfg() -> ScenarioConfig {
        ScenarioConfig {
            chain: ChainSpec::lazy_srw(0.5).unwrap(),
            window: Window::new(0.0, 0.5).unwrap(),
            link: LinkFn::NegArctan,
            noise_sd: 0.0,
            n_grid: vec![100, 1_000, 10_000],
            reps: 20,
            seed: 7,
        }
    }

    #[test]
    fn synthesize_is_deterministic_and_respects_zero_noise() {
        let cfg = lazy_cfg();
        let a = synthesize(&cfg, 50, 3);
        let b = synthesize(&cfg, 50, 3);
        assert_eq!(a, b);
        let c = synthesize(&cfg, 50, 4);
        assert_ne!(a, c);
        for (x, z) in a.xs().iter().zip(a.zs()) {
            assert_eq!(*z, cfg.link.eval(*x));
        }
    }

    #[test]
    fn synthesized_noise_has_zero_conditional_mean() {
        let mut cfg = lazy_cfg();
        cfg.noise_sd = 0.8;
        let n = 100_000;
        let s = synthesize(&cfg, n, 0);
        let resid_mean: f64 = s
            .xs()
            .iter()
            .zip(s.zs())
            .map(|(&x, &z)| z - cfg.link.eval(x))
            .sum::<f64>()
            / (n as f64 + 1.0);
        assert!(resid_mean.abs() <= 3.0 * cfg.noise_sd / (n as f64).sqrt());
    }

    #[test]
    fn link_arithmetic() {
        assert_eq!(LinkFn::NegIdentity.eval(2.0), -2.0);
        // Z = f0(X) + W with X = 2, W = 0.1 under the identity link.
        assert_eq!(LinkFn::NegIdentity.eval(2.0) + 0.1, -1.9);
        assert!(LinkFn::ExpDecay.eval(1.0) < LinkFn::ExpDecay.eval(0.0));
        assert_eq!(LinkFn::from_name("neg_arctan"), Some(LinkFn::NegArctan));
        assert_eq!(LinkFn::from_name("bogus"), None);
    }

    #[test]
    fn zero_noise_consistency_errors_are_exactly_zero() {
        let report = run_consistency(&lazy_cfg()).unwrap();
        for r in &report.records {
            assert_eq!(r.error, 0.0);
            assert_eq!(r.inv_error, 0.0);
        }
        // All-zero medians are not strictly decreasing, so the monotone
        // verdict fails even though every error vanished.
        assert!(!report.summary.pass);
    }

    #[test]
    fn degenerate_single_point_run() {
        let mut cfg = lazy_cfg();
        cfg.n_grid = vec![100];
        cfg.reps = 1;
        let report = run_consistency(&cfg).unwrap();
        assert_eq!(report.records.len(), 1);
        assert!(report.summary.slope.is_none());
    }

    #[test]
    fn rate_run_with_zero_noise_is_flagged_degenerate() {
        let mut cfg = lazy_cfg();
        cfg.n_grid = vec![64, 128, 256, 512, 1024, 2048];
        cfg.reps = 5;
        let report = run_rate(&cfg).unwrap();
        assert!(report.summary.slope.is_none());
        assert!(!report.summary.pass);
        assert!(report
            .summary
            .notes
            .iter()
            .any(|n| n.contains("degenerate")));
    }

    #[test]
    fn rate_run_validates_the_grid() {
        let mut cfg = lazy_cfg();
        cfg.n_grid = vec![100, 200, 300];
        assert!(matches!(
            run_rate(&cfg),
            Err(ExperimentError::Config(_))
        ));
    }

    #[test]
    fn consistency_run_validates_the_grid() {
        let mut cfg = lazy_cfg();
        cfg.n_grid = vec![100, 200]; // two points
        assert!(matches!(run_consistency(&cfg), Err(ExperimentError::Config(_))));
        let mut cfg = lazy_cfg();
        cfg.n_grid = vec![100, 200, 400]; // under two decades
        assert!(matches!(run_consistency(&cfg), Err(ExperimentError::Config(_))));
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let mut cfg = lazy_cfg();
        cfg.reps = 0;
        assert!(matches!(cfg.validate(), Err(ExperimentError::Config(_))));
        let mut cfg = lazy_cfg();
        cfg.noise_sd = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = lazy_cfg();
        cfg.n_grid = vec![100, 100];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn ar1_consistency_medians_decrease() {
        let cfg = ScenarioConfig {
            chain: ChainSpec::ar1(0.5, 1.0).unwrap(),
            window: Window::new(0.0, 0.5).unwrap(),
            link: LinkFn::NegArctan,
            noise_sd: 1.0,
            n_grid: vec![100, 1_000, 10_000],
            reps: 80,
            seed: 5,
        };
        let report = run_consistency(&cfg).unwrap();
        assert!(report.summary.pass, "notes: {:?}", report.summary.notes);
        let medians: Vec<f64> = report
            .summary
            .per_n
            .iter()
            .map(|s| s.median_error.unwrap())
            .collect();
        assert!(medians.windows(2).all(|w| w[0] > w[1]), "{medians:?}");
        // The inverse estimate converges too.
        let inv: Vec<f64> = report
            .summary
            .per_n
            .iter()
            .map(|s| s.median_inv_error.unwrap())
            .collect();
        assert!(inv.last().unwrap() < inv.first().unwrap(), "{inv:?}");
    }

    #[test]
    fn ar1_gc_sup_deviation_scales_like_inverse_sqrt_tn() {
        let cfg = ScenarioConfig {
            chain: ChainSpec::ar1(0.5, 1.0).unwrap(),
            window: Window::new(0.0, 0.5).unwrap(),
            link: LinkFn::NegArctan,
            noise_sd: 0.0,
            n_grid: vec![1_000, 10_000, 100_000],
            reps: 60,
            seed: 6,
        };
        let report = run_gc(&cfg).unwrap();
        assert!(report.summary.pass, "notes: {:?}", report.summary.notes);
        // T_n * sup^2 stays bounded: medians within a factor 3 across the
        // top three grid points.
        let scaled: Vec<f64> = report
            .summary
            .per_n
            .iter()
            .rev()
            .take(3)
            .map(|s| s.median_tn_supdev_sq.unwrap())
            .collect();
        let spread = scaled.iter().cloned().fold(f64::MIN, f64::max)
            / scaled.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 3.0, "scaled medians {scaled:?}");
    }

    #[test]
    fn far_window_excludes_everything_and_fails() {
        let cfg = ScenarioConfig {
            chain: ChainSpec::ar1(0.5, 1.0).unwrap(),
            window: Window::new(1000.0, 0.5).unwrap(),
            link: LinkFn::NegIdentity,
            noise_sd: 1.0,
            n_grid: vec![10, 100, 1_000],
            reps: 4,
            seed: 1,
        };
        cfg.validate().unwrap();
        let report = run_consistency(&cfg).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.excluded.len(), 12);
        assert_eq!(report.summary.excluded_total, 12);
        assert!(!report.summary.pass);
        // Totals reconcile.
        assert_eq!(
            report.records.len() + report.excluded.len(),
            cfg.n_grid.len() * cfg.reps
        );
    }

    #[test]
    fn occupation_run_shapes() {
        let mut cfg = lazy_cfg();
        cfg.n_grid = vec![2_000];
        cfg.reps = 1;
        let report = run_occupation(&cfg).unwrap();
        assert_eq!(report.records.len(), 1);
        assert!(!report.summary.pass);
        assert!(report
            .summary
            .notes
            .iter()
            .any(|n| n.contains("insufficient")));

        // Positive recurrent control: the ratio concentrates near 1.
        let cfg = ScenarioConfig {
            chain: ChainSpec::ar1(0.5, 1.0).unwrap(),
            window: Window::new(0.0, 0.5).unwrap(),
            link: LinkFn::NegIdentity,
            noise_sd: 0.0,
            n_grid: vec![4_000],
            reps: 50,
            seed: 3,
        };
        let report = run_occupation(&cfg).unwrap();
        let ratio = report.summary.per_n[0].moment_ratio.unwrap();
        assert!((ratio - 1.0).abs() <= MOMENT_RATIO_BAND, "ratio {ratio}");
        assert!(report.summary.pass);
        assert_eq!(report.summary.moment_ratio_target, Some(1.0));
    }

    #[test]
    fn records_are_ordered_and_deterministic() {
        let mut cfg = lazy_cfg();
        cfg.noise_sd = 0.5;
        cfg.n_grid = vec![50, 500, 5_000];
        cfg.reps = 8;
        let a = run_consistency(&cfg).unwrap();
        let b = run_consistency(&cfg).unwrap();
        assert_eq!(a, b);
        let keys: Vec<(u64, u64)> = a.records.iter().map(|r| (r.n, r.rep)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        // Byte-identical serializations.
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        assert_eq!(a.to_json_string(), b.to_json_string());
    }

    #[test]
    fn serial_pool_matches_default_schedule() {
        let mut cfg = lazy_cfg();
        cfg.noise_sd = 0.5;
        cfg.reps = 6;
        let parallel = run_consistency(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let serial = pool.install(|| run_consistency(&cfg)).unwrap();
        assert_eq!(parallel.to_csv_string(), serial.to_csv_string());
        assert_eq!(parallel.to_json_string(), serial.to_json_string());
    }

    #[test]
    fn single_point_sup_deviation_formula() {
        // One visit: the deviation is max(F(y), 1 - F(y)) for continuous F.
        let spec = ChainSpec::gaussian_random_walk(1.0).unwrap();
        let w = Window::new(0.0, 0.5).unwrap();
        let sample = TimeSeriesSample::new(vec![0.2, 7.0], vec![1.0, 1.0]).unwrap();
        let ecdf = LocalizedEcdf::from_sample(&sample, &w).unwrap();
        let f = spec.invariant_cdf(&w, 0.2);
        let expected = f.max(1.0 - f);
        assert_eq!(sup_deviation(&ecdf, &spec, &w), expected);
    }
}
