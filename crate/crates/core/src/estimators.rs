//! Drift estimators for the mixed OU process and their asymptotic scale
//! constants.
//!
//! The ergodic route inverts the stationary second moment
//! p(ϑ) = ϑ^{−2H} H Γ(2H) + 1/(2ϑ) at the observed time average of X²;
//! p is strictly decreasing on (0,∞) so the inverse is found by geometric
//! bracketing plus bisection. The non-ergodic route is the quadratic ratio
//! −X_T²/(2∫X²), which is scale invariant and needs no kernel terms.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, numerical, Error, Result};
use crate::gaussgen::{HurstParam, SamplePath};
use crate::special::gamma;
use crate::stochint::{drift_correction, trapezoid_values};

/// Which estimator produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimatorKind {
    Ergodic,
    LseNonergodic,
    LseOracle,
    Cir,
}

/// A point estimate with root-finding diagnostics and an input digest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub name: EstimatorKind,
    pub value: f64,
    pub iterations: u32,
    pub residual: f64,
    pub inputs_digest: u64,
}

fn digest_inputs(tag: u8, scalars: &[f64], values: &[f64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"mixou.estimate.v1");
    hasher.update([tag]);
    for s in scalars {
        hasher.update(s.to_bits().to_le_bytes());
    }
    for v in values {
        hasher.update(v.to_bits().to_le_bytes());
    }
    let d = hasher.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

/// Stationary second moment p(ϑ) = ϑ^{−2H} H Γ(2H) + 1/(2ϑ), ϑ > 0.
pub fn p_func(vartheta: f64, hurst: &HurstParam) -> Result<f64> {
    if !(vartheta > 0.0) {
        return Err(invalid(format!(
            "p is defined for vartheta > 0, got {vartheta}"
        )));
    }
    let h = hurst.h();
    Ok(vartheta.powf(-2.0 * h) * h * gamma(2.0 * h) + 0.5 / vartheta)
}

const P_INV_MAX_BRACKET: i32 = 60;
const P_INV_REL_TOL: f64 = 1e-10;

/// Unique ϑ > 0 with p(ϑ) = v, by bracket expansion and bisection.
/// Returns (root, iterations, |p(root) − v|).
pub fn p_inverse(v: f64, hurst: &HurstParam) -> Result<(f64, u32, f64)> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!(
            "p_inverse needs a positive finite target, got {v}"
        )));
    }
    let mut iterations = 0u32;
    let mut lo = 1.0;
    let mut hi = 1.0;
    // p decreases from +inf to 0: shrink lo until p(lo) >= v, grow hi until p(hi) <= v
    let mut k = 0;
    while p_func(lo, hurst)? < v {
        lo *= 0.5;
        k += 1;
        iterations += 1;
        if k > P_INV_MAX_BRACKET {
            return Err(numerical(format!(
                "p_inverse: no lower bracket for v = {v}"
            )));
        }
    }
    k = 0;
    while p_func(hi, hurst)? > v {
        hi *= 2.0;
        k += 1;
        iterations += 1;
        if k > P_INV_MAX_BRACKET {
            return Err(numerical(format!(
                "p_inverse: no upper bracket for v = {v}"
            )));
        }
    }
    let tol = P_INV_REL_TOL * v.max(1.0);
    let mut mid = 0.5 * (lo + hi);
    let mut resid = (p_func(mid, hurst)? - v).abs();
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let pm = p_func(mid, hurst)?;
        resid = (pm - v).abs();
        iterations += 1;
        if resid <= tol || (hi - lo) <= f64::EPSILON * mid {
            return Ok((mid, iterations, resid));
        }
        if pm > v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(numerical(format!(
        "p_inverse: bisection stalled at residual {resid:.3e}"
    )))
}

/// Ergodic estimator from discrete observations X_δ, …, X_{nδ}:
/// the p-inverse of the mean of squares.
pub fn ergodic_estimator(
    samples: &[f64],
    delta: f64,
    hurst: &HurstParam,
) -> Result<EstimateResult> {
    if samples.len() < 2 {
        return Err(invalid("ergodic estimator needs at least two observations"));
    }
    let mean_sq = samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64;
    if mean_sq == 0.0 {
        return Err(Error::DegenerateInput("mean of squares is zero".into()));
    }
    let (value, iterations, residual) = p_inverse(mean_sq, hurst)?;
    Ok(EstimateResult {
        name: EstimatorKind::Ergodic,
        value,
        iterations,
        residual,
        inputs_digest: digest_inputs(0, &[delta, hurst.h()], samples),
    })
}

/// Ergodic estimator straight from a simulated path (drops the t = 0 point).
pub fn ergodic_estimator_path(x: &SamplePath, hurst: &HurstParam) -> Result<EstimateResult> {
    ergodic_estimator(&x.values[1..], x.grid.delta(), hurst)
}

/// Non-ergodic least squares: −X_T² / (2 ∫ X² dt).
pub fn lse_nonergodic(x: &SamplePath) -> Result<EstimateResult> {
    let xsq: Vec<f64> = x.values.iter().map(|v| v * v).collect();
    let denom = trapezoid_values(&xsq, x.grid.delta())?;
    if denom == 0.0 {
        return Err(Error::DegenerateInput("path is identically zero".into()));
    }
    let value = -x.terminal() * x.terminal() / (2.0 * denom);
    Ok(EstimateResult {
        name: EstimatorKind::LseNonergodic,
        value,
        iterations: 0,
        residual: 0.0,
        inputs_digest: digest_inputs(1, &[x.grid.delta()], &x.values),
    })
}

/// The infeasible least-squares expression that needs the true drift in its
/// memory-correction term; a study tool, not an estimator.
pub fn lse_oracle(
    x: &SamplePath,
    vartheta_true: f64,
    hurst: &HurstParam,
) -> Result<EstimateResult> {
    let xsq: Vec<f64> = x.values.iter().map(|v| v * v).collect();
    let denom = trapezoid_values(&xsq, x.grid.delta())?;
    if denom == 0.0 {
        return Err(Error::DegenerateInput("path is identically zero".into()));
    }
    let t = x.grid.horizon();
    let corr = drift_correction(vartheta_true, hurst, t)?;
    let xt2 = x.terminal() * x.terminal();
    let value = -xt2 / (2.0 * denom) + corr / denom + t / (2.0 * denom);
    Ok(EstimateResult {
        name: EstimatorKind::LseOracle,
        value,
        iterations: 0,
        residual: 0.0,
        inputs_digest: digest_inputs(2, &[vartheta_true, hurst.h(), x.grid.delta()], &x.values),
    })
}

/// Drift estimate for the mixed CIR process from its square-root transform:
/// Ỹ = √X̃ follows the linear equation with drift +ã, the quadratic LSE ratio
/// estimates −ã in the mean-reverting sign convention, and â = 2ã.
pub fn cir_drift_estimator(xtilde: &SamplePath) -> Result<EstimateResult> {
    if xtilde.values[0] <= 0.0 {
        return Err(invalid("CIR path must start positive"));
    }
    if xtilde.values.iter().any(|&v| v <= 0.0) {
        return Err(Error::DegenerateInput(
            "CIR path was absorbed at zero; the estimator is undefined past absorption".into(),
        ));
    }
    let y: Vec<f64> = xtilde.values.iter().map(|v| v.sqrt()).collect();
    let ysq: Vec<f64> = y.iter().map(|v| v * v).collect();
    let denom = trapezoid_values(&ysq, xtilde.grid.delta())?;
    let theta_y = -y.last().unwrap().powi(2) / (2.0 * denom);
    let value = -2.0 * theta_y;
    Ok(EstimateResult {
        name: EstimatorKind::Cir,
        value,
        iterations: 0,
        residual: 0.0,
        inputs_digest: digest_inputs(3, &[xtilde.grid.delta()], &xtilde.values),
    })
}

/// Limit law of the drift estimators, by (ϑ, H) regime. Scale constants are
/// only carried where they are defined, so an out-of-regime access cannot be
/// expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AsymptoticScales {
    /// ϑ > 0, H ∈ (1/2, 3/4): Gaussian limit with standard deviation σ_H.
    CltLowH { sigma_h: f64 },
    /// ϑ > 0, H = 3/4: Gaussian limit under √(T/log T) with variance 4ϑ/π.
    LogH34 { variance: f64 },
    /// ϑ > 0, H ∈ (3/4, 1): second-chaos limit; only its scale constant
    /// −ϑ^{2H−1}/(H Γ(2H)) is exposed, the law itself is not sampled.
    Rosenblatt { scale: f64 },
    /// ϑ < 0: Cauchy limit with scale γ_H = √(−1/(2ϑ) + |ϑ|^{2H} H Γ(2H)).
    Cauchy { gamma_h: f64 },
}

const H_34_EPS: f64 = 1e-12;

/// σ_H of the Gaussian branch; errors outside ϑ > 0, H < 3/4 where Γ(3−4H)
/// hits its pole.
pub fn sigma_h(vartheta: f64, hurst: &HurstParam) -> Result<f64> {
    if !(vartheta > 0.0) {
        return Err(Error::Regime(format!(
            "sigma_h needs vartheta > 0, got {vartheta}"
        )));
    }
    let h = hurst.h();
    if h >= 0.75 - H_34_EPS {
        return Err(Error::Regime(format!(
            "sigma_h is defined for H in (1/2, 3/4); H = {h} sits at or beyond the Gamma(3-4H) pole"
        )));
    }
    let g2h = gamma(2.0 * h);
    let num = vartheta.powf(1.0 - 4.0 * h)
        * h
        * h
        * (4.0 * h - 1.0)
        * (g2h * g2h + g2h * gamma(3.0 - 4.0 * h) * gamma(4.0 * h - 1.0) / gamma(2.0 - 2.0 * h))
        + 0.5 / vartheta;
    let den = vartheta.powf(-2.0 * h) * h * g2h + 0.5 / vartheta;
    Ok(num.sqrt() / den)
}

/// Classify the limit regime of (ϑ, H) and return its scale constant.
pub fn asymptotic_scales(vartheta: f64, hurst: &HurstParam) -> Result<AsymptoticScales> {
    if vartheta == 0.0 {
        return Err(invalid("asymptotic scales are undefined at vartheta = 0"));
    }
    let h = hurst.h();
    if vartheta < 0.0 {
        let a = vartheta.abs();
        let gamma_h = (0.5 / a + a.powf(2.0 * h) * h * gamma(2.0 * h)).sqrt();
        return Ok(AsymptoticScales::Cauchy { gamma_h });
    }
    if (h - 0.75).abs() <= H_34_EPS {
        Ok(AsymptoticScales::LogH34 {
            variance: 4.0 * vartheta / std::f64::consts::PI,
        })
    } else if h < 0.75 {
        Ok(AsymptoticScales::CltLowH {
            sigma_h: sigma_h(vartheta, hurst)?,
        })
    } else {
        Ok(AsymptoticScales::Rosenblatt {
            scale: -vartheta.powf(2.0 * h - 1.0) / (h * gamma(2.0 * h)),
        })
    }
}
