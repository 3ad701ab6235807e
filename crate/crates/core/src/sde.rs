//! Euler simulation of the mixed fractional Ornstein-Uhlenbeck process
//! dX = −ϑ X dt + dξ, its stationary variant, and the mixed CIR process.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gaussgen::{sample_mixed, GeneratorConfig, HurstParam, PathLabel, SamplePath, TimeGrid};

/// Model parameters of the drifted equation on [0, T] with n Euler steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub hurst: HurstParam,
    /// Drift ϑ; positive is the mean-reverting (ergodic) regime.
    pub vartheta: f64,
    pub t_horizon: f64,
    pub n: usize,
    pub x0: f64,
}

impl ModelParams {
    pub fn new(
        hurst: HurstParam,
        vartheta: f64,
        t_horizon: f64,
        n: usize,
        x0: f64,
    ) -> Result<Self> {
        if !(t_horizon > 0.0) || !t_horizon.is_finite() {
            return Err(invalid(format!(
                "horizon {t_horizon} must be positive and finite"
            )));
        }
        if n == 0 {
            return Err(invalid("need at least one Euler step"));
        }
        let p = Self {
            hurst,
            vartheta,
            t_horizon,
            n,
            x0,
        };
        if p.delta() * vartheta.abs() >= 1.0 {
            return Err(invalid(format!(
                "unstable step: delta * |vartheta| = {} must be < 1",
                p.delta() * vartheta.abs()
            )));
        }
        Ok(p)
    }

    pub fn delta(&self) -> f64 {
        self.t_horizon / self.n as f64
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.n, self.delta()).expect("validated at construction")
    }
}

/// Parameters of the mixed CIR equation dX̃ = a X̃ dt + √X̃ ∘ dξ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirParams {
    pub a: f64,
    pub x0: f64,
}

impl CirParams {
    pub fn new(a: f64, x0: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(invalid(format!("CIR drift a = {a} must be positive")));
        }
        if !(x0 > 0.0) {
            return Err(invalid(format!("CIR start x0 = {x0} must be positive")));
        }
        Ok(Self { a, x0 })
    }

    /// Drift of the square-root transform Ỹ.
    pub fn atilde(&self) -> f64 {
        self.a / 2.0
    }

    pub fn y0(&self) -> f64 {
        self.x0.sqrt()
    }
}

/// One Euler recursion x_{i+1} = x_i + c δ x_i + Δξ_i shared by the OU
/// (c = −ϑ) and CIR square-root (c = +ã) processes.
fn euler_linear_drift(
    x0: f64,
    drift_coef: f64,
    delta: f64,
    increments: impl Iterator<Item = f64>,
) -> Vec<f64> {
    let mut values = vec![x0];
    let mut x = x0;
    for dxi in increments {
        x = x + drift_coef * delta * x + dxi;
        values.push(x);
    }
    values
}

fn increments(path: &SamplePath) -> impl Iterator<Item = f64> + '_ {
    path.values.windows(2).map(|w| w[1] - w[0])
}

fn check_same_grid(a: &TimeGrid, b: &TimeGrid) -> Result<()> {
    if a.n() != b.n() || (a.delta() - b.delta()).abs() > 1e-12 * a.delta() {
        return Err(invalid(format!(
            "grid mismatch: {} steps of {} vs {} steps of {}",
            a.n(),
            a.delta(),
            b.n(),
            b.delta()
        )));
    }
    Ok(())
}

/// Euler scheme X_{(i+1)δ} = X_{iδ} − ϑ δ X_{iδ} + (ξ_{(i+1)δ} − ξ_{iδ}).
pub fn euler_mou(params: &ModelParams, xi: &SamplePath) -> Result<SamplePath> {
    check_same_grid(&params.grid(), &xi.grid)?;
    if xi.label != PathLabel::Mfbm {
        return Err(invalid(format!(
            "euler_mou expects an mfBm driver, got {:?}",
            xi.label
        )));
    }
    let values = euler_linear_drift(params.x0, -params.vartheta, params.delta(), increments(xi));
    SamplePath::new(xi.grid, values, PathLabel::Mou, xi.seed)
}

/// Sample the driver and run the Euler scheme from X_0 = x0.
pub fn simulate_mou(
    params: &ModelParams,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<SamplePath> {
    let (_, _, xi) = sample_mixed(&params.grid(), &params.hurst, config, seed)?;
    euler_mou(params, &xi)
}

/// Approximate stationary path together with its burn-in bias bound.
#[derive(Debug, Clone)]
pub struct StationaryMou {
    pub path: SamplePath,
    /// e^{−ϑ·burn_in} √p(ϑ): the exponentially decaying start-up error scale.
    pub bias_bound: f64,
}

/// Approximate the stationary solution by simulating from zero on
/// [−burn_in, T] and discarding the burn-in segment.
pub fn simulate_mou_stationary(
    params: &ModelParams,
    burn_in: f64,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<StationaryMou> {
    if !(params.vartheta > 0.0) {
        return Err(Error::Regime(format!(
            "stationary simulation needs vartheta > 0, got {}",
            params.vartheta
        )));
    }
    if burn_in < 0.0 {
        return Err(invalid(format!("burn_in {burn_in} must be nonnegative")));
    }
    let delta = params.delta();
    let extra = (burn_in / delta).ceil() as usize;
    let total = ModelParams::new(
        params.hurst,
        params.vartheta,
        (params.n + extra) as f64 * delta,
        params.n + extra,
        0.0,
    )?;
    let x = simulate_mou(&total, config, seed)?;
    let values = x.values[extra..].to_vec();
    let path = SamplePath::new(params.grid(), values, PathLabel::StationaryMou, seed)?;
    let stationary_sd = crate::estimators::p_func(params.vartheta, &params.hurst)?.sqrt();
    let bias_bound = (-params.vartheta * (extra as f64 * delta)).exp() * stationary_sd;
    Ok(StationaryMou { path, bias_bound })
}

/// Mixed CIR trajectory and its absorption time, if it hit zero.
#[derive(Debug, Clone)]
pub struct McirPath {
    pub path: SamplePath,
    pub tau: Option<f64>,
}

/// Simulate X̃ = Ỹ² 1_{t ≤ τ} where Ỹ follows the Euler recursion with
/// drift +ã and τ is the first grid time with Ỹ ≤ 0.
pub fn simulate_mcir(
    cir: &CirParams,
    params: &ModelParams,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<McirPath> {
    let grid = params.grid();
    let (_, _, xi) = sample_mixed(&grid, &params.hurst, config, seed)?;
    let y = euler_linear_drift(cir.y0(), cir.atilde(), params.delta(), increments(&xi));
    let mut values = Vec::with_capacity(y.len());
    let mut tau = None;
    for (i, &yi) in y.iter().enumerate() {
        if tau.is_none() && i > 0 && yi <= 0.0 {
            tau = Some(grid.point(i));
        }
        values.push(if tau.is_none() { yi * yi } else { 0.0 });
    }
    let path = SamplePath::new(grid, values, PathLabel::Mcir, seed)?;
    Ok(McirPath { path, tau })
}
