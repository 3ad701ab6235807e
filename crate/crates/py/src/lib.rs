//! Python extension module exposing the main types and operations:
//! path simulation, covariances, drift estimation, the kernel diagnostics
//! and the Φ experiment.

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mixou::{
    drift_correction as rs_drift_correction, ergodic_estimator as rs_ergodic_estimator,
    identity_report, lse_nonergodic as rs_lse, run_phi as rs_run_phi, sample_mixed, simulate_mcir,
    simulate_mou as rs_simulate_mou, solve_g, CirParams, EstimateResult, GeneratorConfig,
    HurstParam, Method, ModelParams, PhiExperiment, SamplePath, TimeGrid,
};

fn err(e: mixou::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_method(method: &str) -> PyResult<Method> {
    method.parse().map_err(err)
}

fn config(method: Method, seed: u64) -> GeneratorConfig {
    GeneratorConfig {
        method,
        master_seed: seed,
        ..Default::default()
    }
}

fn split_path(p: SamplePath) -> (Vec<f64>, Vec<f64>) {
    (p.grid.times(), p.values)
}

/// A drift estimate with its diagnostics.
#[pyclass(name = "Estimate", skip_from_py_object)]
#[derive(Clone)]
struct PyEstimate {
    #[pyo3(get)]
    name: String,
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    iterations: u32,
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    inputs_digest: u64,
}

impl From<EstimateResult> for PyEstimate {
    fn from(e: EstimateResult) -> Self {
        let name = match e.name {
            mixou::EstimatorKind::Ergodic => "ERGODIC",
            mixou::EstimatorKind::LseNonergodic => "LSE_NONERGODIC",
            mixou::EstimatorKind::LseOracle => "LSE_ORACLE",
            mixou::EstimatorKind::Cir => "CIR",
        };
        PyEstimate {
            name: name.to_string(),
            value: e.value,
            iterations: e.iterations,
            residual: e.residual,
            inputs_digest: e.inputs_digest,
        }
    }
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!("Estimate(name={}, value={:.6})", self.name, self.value)
    }
}

/// Covariance of fractional Brownian motion at (s, t).
#[pyfunction]
fn fbm_cov(s: f64, t: f64, h: f64) -> PyResult<f64> {
    let hp = HurstParam::new(h).map_err(err)?;
    mixou::fbm_cov(s, t, &hp).map_err(err)
}

/// Covariance of the mixed driver W + B^H at (s, t).
#[pyfunction]
fn mfbm_cov(s: f64, t: f64, h: f64) -> PyResult<f64> {
    let hp = HurstParam::new(h).map_err(err)?;
    mixou::mfbm_cov(s, t, &hp).map_err(err)
}

/// Sample a mixed fractional Brownian path; returns (times, values).
#[pyfunction]
#[pyo3(signature = (h, t, n, seed, method = "circulant"))]
fn sample_mfbm(
    h: f64,
    t: f64,
    n: usize,
    seed: u64,
    method: &str,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let hp = HurstParam::new(h).map_err(err)?;
    let grid = TimeGrid::from_horizon(n, t).map_err(err)?;
    let cfg = config(parse_method(method)?, seed);
    let (_, _, xi) = sample_mixed(&grid, &hp, &cfg, seed).map_err(err)?;
    Ok(split_path(xi))
}

/// Euler path of the mixed OU equation; returns (times, values).
#[pyfunction]
#[pyo3(signature = (h, theta, t, n, seed, method = "circulant", x0 = 0.0))]
fn simulate_mou(
    h: f64,
    theta: f64,
    t: f64,
    n: usize,
    seed: u64,
    method: &str,
    x0: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let hp = HurstParam::new(h).map_err(err)?;
    let params = ModelParams::new(hp, theta, t, n, x0).map_err(err)?;
    let cfg = config(parse_method(method)?, seed);
    let x = rs_simulate_mou(&params, &cfg, seed).map_err(err)?;
    Ok(split_path(x))
}

/// Mixed CIR path; returns (times, values, tau) with tau = None when the
/// path never hit zero.
#[pyfunction]
#[pyo3(signature = (a, x0, h, t, n, seed, method = "circulant"))]
fn simulate_cir(
    a: f64,
    x0: f64,
    h: f64,
    t: f64,
    n: usize,
    seed: u64,
    method: &str,
) -> PyResult<(Vec<f64>, Vec<f64>, Option<f64>)> {
    let hp = HurstParam::new(h).map_err(err)?;
    let cir = CirParams::new(a, x0).map_err(err)?;
    let params = ModelParams::new(hp, 0.0, t, n, 0.0).map_err(err)?;
    let cfg = config(parse_method(method)?, seed);
    let m = simulate_mcir(&cir, &params, &cfg, seed).map_err(err)?;
    let (times, values) = split_path(m.path);
    Ok((times, values, m.tau))
}

/// Stationary second moment p(theta) of the mixed OU process.
#[pyfunction]
fn p(theta: f64, h: f64) -> PyResult<f64> {
    let hp = HurstParam::new(h).map_err(err)?;
    mixou::p_func(theta, &hp).map_err(err)
}

/// Inverse of p on theta > 0.
#[pyfunction]
fn p_inverse(v: f64, h: f64) -> PyResult<f64> {
    let hp = HurstParam::new(h).map_err(err)?;
    mixou::p_inverse(v, &hp)
        .map(|(value, _, _)| value)
        .map_err(err)
}

/// Memory correction term of the least-squares expression.
#[pyfunction]
fn drift_correction(theta: f64, h: f64, t: f64) -> PyResult<f64> {
    let hp = HurstParam::new(h).map_err(err)?;
    rs_drift_correction(theta, &hp, t).map_err(err)
}

/// Ergodic drift estimate from observations X_δ, …, X_{nδ}.
#[pyfunction]
fn ergodic_estimate(samples: Vec<f64>, delta: f64, h: f64) -> PyResult<PyEstimate> {
    let hp = HurstParam::new(h).map_err(err)?;
    rs_ergodic_estimator(&samples, delta, &hp)
        .map(Into::into)
        .map_err(err)
}

/// Non-ergodic least-squares estimate from a full path (including X_0).
#[pyfunction]
fn lse_estimate(values: Vec<f64>, delta: f64) -> PyResult<PyEstimate> {
    let n = values.len().saturating_sub(1);
    let grid = TimeGrid::new(n.max(1), delta).map_err(err)?;
    let path = SamplePath::new(grid, values, mixou::PathLabel::Mou, 0).map_err(err)?;
    rs_lse(&path).map(Into::into).map_err(err)
}

/// Solve the kernel equation and return its diagnostics.
#[pyfunction]
fn kernel_check(h: f64, t: f64, m: usize) -> PyResult<HashMap<String, f64>> {
    let hp = HurstParam::new(h).map_err(err)?;
    let mut sol = solve_g(t, &hp, m).map_err(err)?;
    let check = sol.check().map_err(err)?;
    Ok(HashMap::from([
        ("residual".to_string(), check.residual),
        ("qv_discrepancy".to_string(), check.qv_discrepancy),
        (
            "property_g_deviation".to_string(),
            check.property_g_deviation,
        ),
    ]))
}

/// Simulate one OU path and return the pathwise-integral identity block.
#[pyfunction]
#[pyo3(signature = (h, theta, t, n, seed))]
fn identity_check(
    h: f64,
    theta: f64,
    t: f64,
    n: usize,
    seed: u64,
) -> PyResult<HashMap<String, f64>> {
    let hp = HurstParam::new(h).map_err(err)?;
    let params = ModelParams::new(hp, theta, t, n, 0.0).map_err(err)?;
    let cfg = config(Method::Circulant, seed);
    let (_, _, xi) = sample_mixed(&params.grid(), &hp, &cfg, seed).map_err(err)?;
    let x = mixou::euler_mou(&params, &xi).map_err(err)?;
    let rep = identity_report(&x, &xi, theta, &hp).map_err(err)?;
    Ok(HashMap::from([
        ("symmetric".to_string(), rep.symmetric),
        ("forward".to_string(), rep.forward),
        ("qv".to_string(), rep.qv),
        ("skorohod".to_string(), rep.skorohod),
        (
            "ito_identity_residual".to_string(),
            rep.residuals.ito_identity,
        ),
        (
            "cross_identity_residual".to_string(),
            rep.residuals.cross_identity,
        ),
    ]))
}

/// Run the Φ experiment; returns its moment statistics as a dict.
#[pyfunction]
#[pyo3(signature = (h, theta, t, delta, reps, seed))]
fn phi_stats(
    h: f64,
    theta: f64,
    t: f64,
    delta: f64,
    reps: usize,
    seed: u64,
) -> PyResult<HashMap<String, f64>> {
    let exp = PhiExperiment {
        h,
        theta,
        t,
        delta,
        reps,
        seed,
        method: Method::Circulant,
    };
    let rep = rs_run_phi(&exp).map_err(err)?;
    Ok(HashMap::from([
        ("mean".to_string(), rep.stats.mean),
        ("median".to_string(), rep.stats.median),
        ("sdev".to_string(), rep.stats.sdev),
        ("skewness".to_string(), rep.stats.skewness),
        ("kurtosis".to_string(), rep.stats.kurtosis),
    ]))
}

#[pymodule]
fn mixou_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(fbm_cov, m)?)?;
    m.add_function(wrap_pyfunction!(mfbm_cov, m)?)?;
    m.add_function(wrap_pyfunction!(sample_mfbm, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_mou, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_cir, m)?)?;
    m.add_function(wrap_pyfunction!(p, m)?)?;
    m.add_function(wrap_pyfunction!(p_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(drift_correction, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(lse_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_check, m)?)?;
    m.add_function(wrap_pyfunction!(identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(phi_stats, m)?)?;
    Ok(())
}
