//! Monte Carlo experiment runner, summary statistics, the Φ statistic, and
//! report emission.
//!
//! A run is a cross product of parameter lists; every (cell, replication)
//! pair draws its seed from a keyed hash of the cell parameters and the
//! replication index, so results are a pure function of (spec, master_seed)
//! and independent of execution order and worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, numerical, Error, Result};
use crate::estimators::{ergodic_estimator_path, lse_nonergodic, sigma_h};
use crate::gaussgen::{GeneratorConfig, HurstParam, Method};
use crate::rng::{derive_seed, param_id};
use crate::sde::{simulate_mou, ModelParams};
use crate::special::gamma;

/// Which estimator the experiment applies to each simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorChoice {
    Ergodic,
    Lse,
}

impl std::str::FromStr for EstimatorChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ergodic" => Ok(EstimatorChoice::Ergodic),
            "lse" => Ok(EstimatorChoice::Lse),
            other => Err(invalid(format!("unknown estimator `{other}`"))),
        }
    }
}

/// Cross-product experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    pub theta: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    pub delta: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_estimator")]
    pub estimator: EstimatorChoice,
}

fn default_method() -> Method {
    Method::Circulant
}

fn default_estimator() -> EstimatorChoice {
    EstimatorChoice::Ergodic
}

impl ExperimentSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            toml::from_str(s).map_err(|e| invalid(format!("config parse error: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(invalid("reps must be at least 1"));
        }
        for (name, list) in [
            ("H", &self.h),
            ("theta", &self.theta),
            ("T", &self.t),
            ("delta", &self.delta),
        ] {
            if list.is_empty() {
                return Err(invalid(format!("parameter list {name} is empty")));
            }
        }
        for &h in &self.h {
            HurstParam::new(h)?;
        }
        for &t in &self.t {
            if !(t > 0.0) {
                return Err(invalid(format!("T = {t} must be positive")));
            }
        }
        for &d in &self.delta {
            if !(d > 0.0) {
                return Err(invalid(format!("delta = {d} must be positive")));
            }
        }
        Ok(())
    }

    fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for &h in &self.h {
            for &theta in &self.theta {
                for &t in &self.t {
                    for &delta in &self.delta {
                        out.push(CellKey { h, theta, t, delta });
                    }
                }
            }
        }
        out
    }
}

/// One parameter combination of the run matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub h: f64,
    pub theta: f64,
    pub t: f64,
    pub delta: f64,
}

impl CellKey {
    fn steps(&self) -> usize {
        ((self.t / self.delta).round() as usize).max(1)
    }

    fn stream_id(&self) -> u64 {
        param_id(&[self.h, self.theta, self.t, self.delta])
    }
}

/// Replication outcomes of one cell.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub key: CellKey,
    pub estimates: Vec<f64>,
    pub failures: usize,
    pub reps: usize,
}

fn run_replication(key: &CellKey, spec: &ExperimentSpec, rep: u64) -> Result<f64> {
    let hurst = HurstParam::new(key.h)?;
    let n = key.steps();
    let params = ModelParams::new(hurst, key.theta, n as f64 * key.delta, n, 0.0)?;
    let config = GeneratorConfig {
        method: spec.method,
        master_seed: spec.seed,
        ..Default::default()
    };
    let seed = derive_seed(spec.seed, &[key.stream_id(), rep]);
    let x = simulate_mou(&params, &config, seed)?;
    let est = match spec.estimator {
        EstimatorChoice::Ergodic => ergodic_estimator_path(&x, &hurst)?,
        EstimatorChoice::Lse => lse_nonergodic(&x)?,
    };
    Ok(est.value)
}

fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| numerical(format!("thread pool: {e}")))
}

fn env_threads() -> Option<usize> {
    std::env::var("MIXOU_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
}

pub(crate) fn run_experiment_with_threads(
    spec: &ExperimentSpec,
    threads: Option<usize>,
) -> Result<Vec<CellOutcome>> {
    spec.validate()?;
    let cells = spec.cells();
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..spec.reps as u64).map(move |r| (c, r)))
        .collect();
    let pool = build_pool(threads)?;
    let results: Vec<std::result::Result<f64, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r)| run_replication(&cells[c], spec, r).map_err(|e| e.to_string()))
            .collect()
    });
    let mut outcomes: Vec<CellOutcome> = cells
        .into_iter()
        .map(|key| CellOutcome {
            key,
            estimates: Vec::new(),
            failures: 0,
            reps: spec.reps,
        })
        .collect();
    for ((c, _), res) in jobs.iter().zip(results) {
        match res {
            Ok(v) => outcomes[*c].estimates.push(v),
            Err(_) => outcomes[*c].failures += 1,
        }
    }
    Ok(outcomes)
}

/// Run the whole experiment matrix. Worker count comes from `MIXOU_THREADS`
/// (defaults to the available cores); the output does not depend on it.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<CellOutcome>> {
    run_experiment_with_threads(spec, env_threads())
}

/// One row of the summary table. `mean`/`sdev` are absent for cells whose
/// failure rate exceeded the 1% policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "H")]
    pub h: f64,
    pub theta_true: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub delta: f64,
    pub l: usize,
    pub mean: Option<f64>,
    pub sdev: Option<f64>,
}

/// Per-cell Monte Carlo means and standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub schema_version: u32,
    pub rows: Vec<SummaryRow>,
}

pub const SCHEMA_VERSION: u32 = 1;

fn mean_and_sdev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sdev = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, sdev)
}

/// Reduce replication outcomes to the summary table.
pub fn summarize(outcomes: &[CellOutcome]) -> Result<SummaryTable> {
    if outcomes.is_empty() {
        return Err(invalid("summarize needs at least one cell"));
    }
    let rows = outcomes
        .iter()
        .map(|o| {
            let failure_cap = (0.01 * o.reps as f64).floor() as usize;
            let (mean, sdev) = if o.estimates.is_empty() || o.failures > failure_cap {
                (None, None)
            } else {
                let (m, s) = mean_and_sdev(&o.estimates);
                (Some(m), Some(s))
            };
            SummaryRow {
                h: o.key.h,
                theta_true: o.key.theta,
                t: o.key.t,
                delta: o.key.delta,
                l: o.reps,
                mean,
                sdev,
            }
        })
        .collect();
    Ok(SummaryTable {
        schema_version: SCHEMA_VERSION,
        rows,
    })
}

/// The centered-and-scaled estimation error
/// Φ = ϑ (H Γ(2H) ϑ^{1−2H} + ½) √(nδ) / σ_H · (θ̃ − ϑ),
/// defined on the Gaussian branch ϑ > 0, H ∈ (1/2, 3/4).
pub fn phi_statistic(
    theta_tilde: f64,
    n: usize,
    hurst: &HurstParam,
    vartheta: f64,
    delta: f64,
) -> Result<f64> {
    if n == 0 || !(delta > 0.0) {
        return Err(invalid("phi_statistic needs n >= 1 and delta > 0"));
    }
    let s = sigma_h(vartheta, hurst)?;
    let h = hurst.h();
    let scale = vartheta
        * (h * gamma(2.0 * h) * vartheta.powf(1.0 - 2.0 * h) + 0.5)
        * (n as f64 * delta).sqrt()
        / s;
    Ok(scale * (theta_tilde - vartheta))
}

/// Moment statistics of a sample; kurtosis is the raw fourth standardized
/// moment (3 for the normal), not excess.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiStats {
    pub mean: f64,
    pub median: f64,
    pub sdev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Moment-based statistics of at least four values.
pub fn histogram_stats(values: &[f64]) -> Result<PhiStats> {
    if values.len() < 4 {
        return Err(invalid(format!(
            "need at least 4 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let sdev = (m2 * n / (n - 1.0)).sqrt();
    let (skewness, kurtosis) = if m2 == 0.0 {
        (0.0, 0.0)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2))
    };
    Ok(PhiStats {
        mean,
        median,
        sdev,
        skewness,
        kurtosis,
    })
}

/// Equal-width bin counts, emitted instead of plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() || bins == 0 {
        return Err(invalid("histogram needs values and a positive bin count"));
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Φ-experiment description for the CLI subcommand.
#[derive(Debug, Clone, Copy)]
pub struct PhiExperiment {
    pub h: f64,
    pub theta: f64,
    pub t: f64,
    pub delta: f64,
    pub reps: usize,
    pub seed: u64,
    pub method: Method,
}

/// Φ-experiment output: moment statistics plus bin counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiReport {
    pub schema_version: u32,
    #[serde(rename = "H")]
    pub h: f64,
    pub theta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub delta: f64,
    pub l: usize,
    pub failures: usize,
    pub stats: PhiStats,
    pub histogram: Histogram,
}

pub(crate) fn run_phi_with_threads(
    exp: &PhiExperiment,
    threads: Option<usize>,
) -> Result<Vec<f64>> {
    let hurst = HurstParam::new(exp.h)?;
    // fail fast if the regime is wrong
    sigma_h(exp.theta, &hurst)?;
    let n = ((exp.t / exp.delta).round() as usize).max(1);
    let params = ModelParams::new(hurst, exp.theta, n as f64 * exp.delta, n, 0.0)?;
    let config = GeneratorConfig {
        method: exp.method,
        master_seed: exp.seed,
        ..Default::default()
    };
    let cell = param_id(&[exp.h, exp.theta, exp.t, exp.delta]);
    let pool = build_pool(threads)?;
    let values: Vec<std::result::Result<f64, String>> = pool.install(|| {
        (0..exp.reps as u64)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(exp.seed, &[cell, r]);
                let x = simulate_mou(&params, &config, seed).map_err(|e| e.to_string())?;
                let est = ergodic_estimator_path(&x, &hurst).map_err(|e| e.to_string())?;
                phi_statistic(est.value, n, &hurst, exp.theta, exp.delta).map_err(|e| e.to_string())
            })
            .collect()
    });
    Ok(values.into_iter().flatten().collect())
}

/// Run the Φ experiment and package statistics plus a 40-bin histogram.
pub fn run_phi(exp: &PhiExperiment) -> Result<PhiReport> {
    let phis = run_phi_with_threads(exp, env_threads())?;
    let failures = exp.reps - phis.len();
    if failures * 100 > exp.reps {
        return Err(numerical(format!(
            "{failures} of {} Φ replications failed",
            exp.reps
        )));
    }
    let stats = histogram_stats(&phis)?;
    let histogram = histogram(&phis, 40)?;
    Ok(PhiReport {
        schema_version: SCHEMA_VERSION,
        h: exp.h,
        theta: exp.theta,
        t: exp.t,
        delta: exp.delta,
        l: exp.reps,
        failures,
        stats,
        histogram,
    })
}

/// What `emit_report` serializes.
pub enum Report<'a> {
    Table(&'a SummaryTable),
    Stats(&'a PhiStats),
}

/// Output encoding of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(invalid(format!("unknown report format `{other}`"))),
        }
    }
}

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Serialize a report; the bytes are a pure function of the input.
pub fn emit_report(report: Report<'_>, format: ReportFormat) -> Result<Vec<u8>> {
    match (report, format) {
        (Report::Table(t), ReportFormat::Csv) => {
            let mut out = String::from("H,theta_true,T,delta,l,mean,sdev\n");
            for r in &t.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.h,
                    r.theta_true,
                    r.t,
                    r.delta,
                    r.l,
                    opt_field(r.mean),
                    opt_field(r.sdev)
                ));
            }
            Ok(out.into_bytes())
        }
        (Report::Table(t), ReportFormat::Json) => {
            let mut bytes = serde_json::to_vec_pretty(t).map_err(|e| numerical(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        (Report::Stats(s), ReportFormat::Csv) => Ok(format!(
            "mean,median,sdev,skewness,kurtosis\n{},{},{},{},{}\n",
            s.mean, s.median, s.sdev, s.skewness, s.kurtosis
        )
        .into_bytes()),
        (Report::Stats(s), ReportFormat::Json) => {
            let mut bytes = serde_json::to_vec_pretty(s).map_err(|e| numerical(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Parse a summary-table CSV produced by [`emit_report`].
pub fn parse_table_csv(bytes: &[u8]) -> Result<SummaryTable> {
    let text = std::str::from_utf8(bytes).map_err(|e| invalid(format!("csv is not utf-8: {e}")))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "H,theta_true,T,delta,l,mean,sdev" {
                return Err(invalid(format!("unexpected header `{line}`")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 7 {
            return Err(invalid(format!("row {i} has {} fields", parts.len())));
        }
        let f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| invalid(format!("row {i}: bad number `{s}`: {e}")))
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                f(s).map(Some)
            }
        };
        rows.push(SummaryRow {
            h: f(parts[0])?,
            theta_true: f(parts[1])?,
            t: f(parts[2])?,
            delta: f(parts[3])?,
            l: parts[4]
                .parse()
                .map_err(|e| invalid(format!("row {i}: bad count: {e}")))?,
            mean: opt(parts[5])?,
            sdev: opt(parts[6])?,
        });
    }
    Ok(SummaryTable {
        schema_version: SCHEMA_VERSION,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand_distr::Distribution;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec {
            h: vec![0.6],
            theta: vec![0.5],
            t: vec![5.0],
            delta: vec![0.05],
            reps: 4,
            seed: 123,
            method: Method::Circulant,
            estimator: EstimatorChoice::Ergodic,
        }
    }

    #[test]
    fn single_replication_is_deterministic() {
        let mut spec = small_spec();
        spec.reps = 1;
        let a = run_experiment_with_threads(&spec, Some(1)).unwrap();
        let b = run_experiment_with_threads(&spec, Some(1)).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].estimates.len(), 1);
        assert_eq!(a[0].estimates, b[0].estimates);
        assert_eq!(a[0].failures, 0);
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let spec = small_spec();
        let a = run_experiment_with_threads(&spec, Some(1)).unwrap();
        let b = run_experiment_with_threads(&spec, Some(4)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.estimates, y.estimates);
        }
        let bytes_a =
            emit_report(Report::Table(&summarize(&a).unwrap()), ReportFormat::Csv).unwrap();
        let bytes_b =
            emit_report(Report::Table(&summarize(&b).unwrap()), ReportFormat::Csv).unwrap();
        assert_eq!(bytes_a, bytes_b);
    }

    #[test]
    fn cells_use_disjoint_streams() {
        let mut spec = small_spec();
        spec.theta = vec![0.4, 0.5];
        spec.reps = 2;
        let out = run_experiment_with_threads(&spec, Some(2)).unwrap();
        assert_eq!(out.len(), 2);
        assert_ne!(out[0].estimates, out[1].estimates);
    }

    #[test]
    fn summarize_trivial_cells() {
        let key = CellKey {
            h: 0.6,
            theta: 0.5,
            t: 1.0,
            delta: 0.1,
        };
        let constant = CellOutcome {
            key,
            estimates: vec![2.5; 8],
            failures: 0,
            reps: 8,
        };
        let t = summarize(&[constant]).unwrap();
        assert_eq!(t.rows[0].mean, Some(2.5));
        assert_eq!(t.rows[0].sdev, Some(0.0));
        let two = CellOutcome {
            key,
            estimates: vec![0.0, 2.0],
            failures: 0,
            reps: 2,
        };
        let t = summarize(&[two]).unwrap();
        assert_eq!(t.rows[0].mean, Some(1.0));
        assert!((t.rows[0].sdev.unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn failed_cells_get_missing_markers() {
        let key = CellKey {
            h: 0.6,
            theta: 0.5,
            t: 1.0,
            delta: 0.1,
        };
        // 5 failures out of 100 exceeds the 1% policy
        let bad = CellOutcome {
            key,
            estimates: vec![1.0; 95],
            failures: 5,
            reps: 100,
        };
        let t = summarize(&[bad]).unwrap();
        assert_eq!(t.rows[0].mean, None);
        assert_eq!(t.rows[0].sdev, None);
        let csv = emit_report(Report::Table(&t), ReportFormat::Csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",100,,"));
    }

    #[test]
    fn phi_is_zero_at_truth_and_linear_in_error() {
        let h = HurstParam::new(0.618).unwrap();
        let phi0 = phi_statistic(0.1, 1200, &h, 0.1, 1.0 / 12.0).unwrap();
        assert_eq!(phi0, 0.0);
        let p1 = phi_statistic(0.1 + 0.01, 1200, &h, 0.1, 1.0 / 12.0).unwrap();
        let p2 = phi_statistic(0.1 + 0.02, 1200, &h, 0.1, 1.0 / 12.0).unwrap();
        assert!((p2 - 2.0 * p1).abs() < 1e-12 * p1.abs());
    }

    #[test]
    fn phi_rejects_out_of_regime_parameters() {
        let h = HurstParam::new(0.8).unwrap();
        assert!(matches!(
            phi_statistic(0.1, 100, &h, 0.1, 0.1),
            Err(Error::Regime(_))
        ));
        let h34 = HurstParam::new(0.75).unwrap();
        assert!(phi_statistic(0.1, 100, &h34, 0.1, 0.1).is_err());
    }

    #[test]
    fn histogram_stats_reference_cases() {
        let s = histogram_stats(&[-1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.median, 0.0);
        assert_eq!(s.skewness, 0.0);
        let s = histogram_stats(&[-1.0, 0.0, 1.0, 2.0, -2.0]).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.median, 0.0);
        assert_eq!(s.skewness, 0.0, "exactly symmetric multiset");
        assert!(histogram_stats(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn histogram_stats_match_standard_normal_moments() {
        let mut rng = substream(99, &[0]);
        let values: Vec<f64> = (0..1_000_000)
            .map(|_| rand_distr::StandardNormal.sample(&mut rng))
            .collect();
        let s = histogram_stats(&values).unwrap();
        let n = values.len() as f64;
        assert!(s.mean.abs() < 3.0 / n.sqrt());
        assert!((s.sdev - 1.0).abs() < 3.0 / (2.0 * n).sqrt() + 1e-3);
        assert!(s.skewness.abs() < 3.0 * (6.0 / n).sqrt());
        assert!((s.kurtosis - 3.0).abs() < 3.0 * (24.0 / n).sqrt() + 5e-3);
    }

    #[test]
    fn histogram_counts_cover_everything() {
        let values = vec![0.0, 0.1, 0.5, 0.9, 1.0];
        let h = histogram(&values, 4).unwrap();
        assert_eq!(h.edges.len(), 5);
        assert_eq!(h.counts.iter().sum::<u64>(), 5);
        assert_eq!(
            *h.counts.last().unwrap(),
            2,
            "right edge lands in the last bin"
        );
    }

    #[test]
    fn report_csv_header_only_for_empty_table() {
        let t = SummaryTable {
            schema_version: SCHEMA_VERSION,
            rows: vec![],
        };
        let csv = emit_report(Report::Table(&t), ReportFormat::Csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "H,theta_true,T,delta,l,mean,sdev\n"
        );
    }

    #[test]
    fn report_csv_roundtrip_is_identical() {
        let t = SummaryTable {
            schema_version: SCHEMA_VERSION,
            rows: vec![SummaryRow {
                h: 0.55,
                theta_true: 0.1,
                t: 100.0,
                delta: 1.0 / 250.0,
                l: 200,
                mean: Some(0.10800000001),
                sdev: Some(0.0364),
            }],
        };
        let csv = emit_report(Report::Table(&t), ReportFormat::Csv).unwrap();
        let parsed = parse_table_csv(&csv).unwrap();
        let csv2 = emit_report(Report::Table(&parsed), ReportFormat::Csv).unwrap();
        assert_eq!(csv, csv2);
        assert_eq!(t, parsed);
    }

    #[test]
    fn report_json_has_versioned_schema() {
        let t = SummaryTable {
            schema_version: SCHEMA_VERSION,
            rows: vec![],
        };
        let js = emit_report(Report::Table(&t), ReportFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&js).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert!(v["rows"].is_array());
    }

    #[test]
    fn config_parsing_happy_and_sad_paths() {
        let cfg = r#"
            H = [0.55, 0.75]
            theta = [0.1, 0.5]
            T = [20.0]
            delta = [0.08333333333333333]
            reps = 10
            seed = 42
            method = "circulant"
            estimator = "ergodic"
        "#;
        let spec = ExperimentSpec::from_toml_str(cfg).unwrap();
        assert_eq!(spec.h.len(), 2);
        assert_eq!(spec.cells().len(), 4);
        assert!(ExperimentSpec::from_toml_str("H = [0.6]").is_err());
        let bad_h = r#"
            H = [0.4]
            theta = [0.1]
            T = [10.0]
            delta = [0.1]
            reps = 2
            seed = 1
        "#;
        assert!(ExperimentSpec::from_toml_str(bad_h).is_err());
    }

    #[test]
    fn run_phi_produces_sane_report() {
        let exp = PhiExperiment {
            h: 0.618,
            theta: 0.5,
            t: 20.0,
            delta: 0.1,
            reps: 24,
            seed: 5,
            method: Method::Circulant,
        };
        let rep = run_phi(&exp).unwrap();
        assert_eq!(rep.l, 24);
        assert_eq!(rep.failures, 0);
        assert_eq!(rep.histogram.counts.iter().sum::<u64>() as usize, 24);
        assert!(rep.stats.sdev > 0.0);
    }

    #[test]
    fn experiment_mean_lands_near_truth() {
        let spec = ExperimentSpec {
            h: vec![0.55],
            theta: vec![0.5],
            t: vec![50.0],
            delta: vec![0.05],
            reps: 32,
            seed: 7,
            method: Method::Circulant,
            estimator: EstimatorChoice::Ergodic,
        };
        let out = run_experiment_with_threads(&spec, None).unwrap();
        let table = summarize(&out).unwrap();
        let mean = table.rows[0].mean.unwrap();
        let sdev = table.rows[0].sdev.unwrap();
        assert!(
            (mean - 0.5).abs() < 4.0 * sdev / (32f64).sqrt() + 0.05,
            "mean {mean} sdev {sdev}"
        );
    }
}
