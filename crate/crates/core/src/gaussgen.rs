//! Gaussian path generation: Brownian motion, fractional Brownian motion with
//! H > 1/2, and their mixture on uniform grids.
//!
//! Two fBm routes are provided. The Cholesky route factors the exact
//! fractional-Gaussian-noise covariance and is O(n³); the circulant route
//! embeds the fGn autocovariance in a circulant matrix, diagonalizes it with
//! one FFT and is O(n log n). Both are exact in distribution and agree
//! by construction of the same covariance.

use std::io::{BufRead, Write};
use std::path::Path;

use rand_chacha::ChaCha12Rng;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, numerical, Error, Result};
use crate::linalg::cholesky_lower;
use crate::rng::{standard_normals, substream};

/// Hurst exponent restricted to the long-memory range (1/2, 1), with the
/// kernel constant α_H = H(2H−1) cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstParam {
    h: f64,
    alpha: f64,
}

impl HurstParam {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.5 && h < 1.0) {
            return Err(invalid(format!("Hurst parameter {h} must lie in (1/2, 1)")));
        }
        Ok(Self {
            h,
            alpha: h * (2.0 * h - 1.0),
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// α_H = H(2H−1).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Uniform grid t_i = i·δ, i = 0..=n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    n: usize,
    delta: f64,
}

impl TimeGrid {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("grid needs at least one step"));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(invalid(format!(
                "grid step {delta} must be positive and finite"
            )));
        }
        Ok(Self { n, delta })
    }

    /// Grid with n steps covering [0, T].
    pub fn from_horizon(n: usize, t_horizon: f64) -> Result<Self> {
        if !(t_horizon > 0.0) {
            return Err(invalid(format!("horizon {t_horizon} must be positive")));
        }
        Self::new(n, t_horizon / n as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.delta
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.point(i)).collect()
    }
}

/// Which process a path realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathLabel {
    Bm,
    Fbm,
    Mfbm,
    Mou,
    Mcir,
    StationaryMou,
}

/// A uniformly sampled trajectory with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub label: PathLabel,
    pub seed: u64,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, values: Vec<f64>, label: PathLabel, seed: u64) -> Result<Self> {
        if values.len() != grid.n() + 1 {
            return Err(invalid(format!(
                "path length {} does not match grid with {} steps",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid,
            values,
            label,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("path is never empty")
    }

    /// Serialize as `t,value` CSV with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.grid.point(i), v)?;
        }
        Ok(())
    }

    pub fn save_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Read a `t,value` CSV produced by [`SamplePath::write_csv`]. The grid
    /// step is recovered from the time column and must be uniform.
    pub fn read_csv<R: BufRead>(r: R, label: PathLabel) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('t')) {
                continue;
            }
            let mut parts = line.split(',');
            let (Some(ts), Some(vs)) = (parts.next(), parts.next()) else {
                return Err(invalid(format!("csv line {} is not `t,value`", lineno + 1)));
            };
            let t: f64 = ts
                .trim()
                .parse()
                .map_err(|e| invalid(format!("csv line {}: bad time: {e}", lineno + 1)))?;
            let v: f64 = vs
                .trim()
                .parse()
                .map_err(|e| invalid(format!("csv line {}: bad value: {e}", lineno + 1)))?;
            times.push(t);
            values.push(v);
        }
        if times.len() < 2 {
            return Err(invalid("csv path needs at least two rows"));
        }
        let delta = times[1] - times[0];
        let grid = TimeGrid::new(times.len() - 1, delta)?;
        for (i, t) in times.iter().enumerate() {
            if (t - grid.point(i)).abs() > 1e-9 * (1.0 + t.abs()) {
                return Err(invalid(format!(
                    "csv time column is not a uniform grid at row {i}"
                )));
            }
        }
        SamplePath::new(grid, values, label, 0)
    }

    pub fn load_csv<P: AsRef<Path>>(path: P, label: PathLabel) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f), label)
    }
}

/// fBm generation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cholesky,
    Circulant,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cholesky" => Ok(Method::Cholesky),
            "circulant" => Ok(Method::Circulant),
            other => Err(invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Generator selection plus the master seed all sub-streams derive from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub method: Method,
    pub master_seed: u64,
    /// Largest n the O(n³) Cholesky route accepts.
    pub cholesky_cap: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Circulant,
            master_seed: 0,
            cholesky_cap: 4096,
        }
    }
}

fn check_nonnegative_times(s: f64, t: f64) -> Result<()> {
    if s < 0.0 || t < 0.0 {
        return Err(invalid(format!(
            "covariance times ({s}, {t}) must be nonnegative"
        )));
    }
    Ok(())
}

/// Covariance of fBm: ½(s^{2H} + t^{2H} − |t−s|^{2H}).
pub fn fbm_cov(s: f64, t: f64, hurst: &HurstParam) -> Result<f64> {
    check_nonnegative_times(s, t)?;
    let two_h = 2.0 * hurst.h();
    Ok(0.5 * (s.powf(two_h) + t.powf(two_h) - (t - s).abs().powf(two_h)))
}

/// Covariance of the mixture ξ = W + B^H: min(s,t) + fBm part.
pub fn mfbm_cov(s: f64, t: f64, hurst: &HurstParam) -> Result<f64> {
    Ok(s.min(t) + fbm_cov(s, t, hurst)?)
}

/// Autocovariance of fractional Gaussian noise at lag k on step δ:
/// γ(k) = ½ δ^{2H} (|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H}).
pub fn fgn_autocov(k: usize, delta: f64, hurst: &HurstParam) -> f64 {
    let two_h = 2.0 * hurst.h();
    let k = k as f64;
    0.5 * delta.powf(two_h)
        * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Brownian path from iid increments.
pub fn sample_bm(grid: &TimeGrid, rng: &mut ChaCha12Rng, seed: u64) -> SamplePath {
    let sqrt_dt = grid.delta().sqrt();
    let z = standard_normals(rng, grid.n());
    let mut values = Vec::with_capacity(grid.n() + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for zi in z {
        acc += sqrt_dt * zi;
        values.push(acc);
    }
    SamplePath {
        grid: *grid,
        values,
        label: PathLabel::Bm,
        seed,
    }
}

/// Exact fBm path by Cholesky factorization of the increment covariance.
pub fn sample_fbm_cholesky(
    grid: &TimeGrid,
    hurst: &HurstParam,
    seed: u64,
    cap: usize,
) -> Result<SamplePath> {
    let n = grid.n();
    if n > cap {
        return Err(invalid(format!(
            "cholesky route limited to n <= {cap} (requested {n}); use the circulant method"
        )));
    }
    let cov: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| fgn_autocov(i.abs_diff(j), grid.delta(), hurst))
                .collect()
        })
        .collect();
    let l = cholesky_lower(&cov, 1e-10 * grid.delta().powf(2.0 * hurst.h()))?;
    let mut rng = substream(seed, &[STREAM_FBM]);
    let z = standard_normals(&mut rng, n);
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for i in 0..n {
        let mut inc = 0.0;
        for k in 0..=i {
            inc += l[i][k] * z[k];
        }
        acc += inc;
        values.push(acc);
    }
    SamplePath::new(*grid, values, PathLabel::Fbm, seed)
}

const STREAM_BM: u64 = 0;
const STREAM_FBM: u64 = 1;
const MAX_EMBED_DOUBLINGS: u32 = 6;

/// fGn of length n via circulant embedding; consumes `rng`.
fn fgn_circulant(
    n: usize,
    delta: f64,
    hurst: &HurstParam,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(invalid("circulant route needs n >= 2"));
    }
    let mut m = (2 * n).next_power_of_two();
    for _ in 0..=MAX_EMBED_DOUBLINGS {
        let half = m / 2;
        let mut first_row = vec![0.0; m];
        for (k, slot) in first_row.iter_mut().enumerate().take(half + 1) {
            *slot = fgn_autocov(k, delta, hurst);
        }
        for k in 1..half {
            first_row[m - k] = first_row[k];
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        let mut buf: Vec<Complex<f64>> = first_row.iter().map(|&c| Complex::new(c, 0.0)).collect();
        fft.process(&mut buf);
        let eigen: Vec<f64> = buf.iter().map(|c| c.re).collect();
        let max_eigen = eigen.iter().cloned().fold(0.0, f64::max);
        let tol = -1e-10 * max_eigen.max(1.0);
        if eigen.iter().any(|&l| l < tol) {
            m *= 2;
            continue;
        }
        // Hermitian complex normals weighted by sqrt(eigen / 2m); the real
        // part of their DFT has exactly the embedded covariance.
        let z = standard_normals(rng, 2 * m);
        let mut spec = vec![Complex::new(0.0, 0.0); m];
        let scale = |lam: f64| (lam.max(0.0) / (2.0 * m as f64)).sqrt();
        spec[0] = Complex::new(std::f64::consts::SQRT_2 * scale(eigen[0]) * z[0], 0.0);
        spec[half] = Complex::new(std::f64::consts::SQRT_2 * scale(eigen[half]) * z[1], 0.0);
        for k in 1..half {
            let s = scale(eigen[k]);
            spec[k] = Complex::new(s * z[2 * k], s * z[2 * k + 1]);
            spec[m - k] = spec[k].conj();
        }
        fft.process(&mut spec);
        return Ok(spec.iter().take(n).map(|c| c.re).collect());
    }
    Err(numerical(format!(
        "circulant embedding stayed indefinite after {MAX_EMBED_DOUBLINGS} doublings (n = {n})"
    )))
}

/// fBm path via FFT circulant embedding of the fGn autocovariance.
pub fn sample_fbm_circulant(
    n: usize,
    delta: f64,
    hurst: &HurstParam,
    seed: u64,
) -> Result<SamplePath> {
    let grid = TimeGrid::new(n, delta)?;
    let mut rng = substream(seed, &[STREAM_FBM]);
    let fgn = fgn_circulant(n, delta, hurst, &mut rng)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for inc in fgn {
        acc += inc;
        values.push(acc);
    }
    SamplePath::new(grid, values, PathLabel::Fbm, seed)
}

/// fBm path with the configured method.
pub fn sample_fbm(
    grid: &TimeGrid,
    hurst: &HurstParam,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<SamplePath> {
    match config.method {
        Method::Cholesky => sample_fbm_cholesky(grid, hurst, seed, config.cholesky_cap),
        Method::Circulant => sample_fbm_circulant(grid.n(), grid.delta(), hurst, seed),
    }
}

/// Sample the mixed driver: independent W and B^H plus their sum ξ.
/// The two components draw from disjoint sub-streams of `seed`.
pub fn sample_mixed(
    grid: &TimeGrid,
    hurst: &HurstParam,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<(SamplePath, SamplePath, SamplePath)> {
    let mut bm_rng = substream(seed, &[STREAM_BM]);
    let w = sample_bm(grid, &mut bm_rng, seed);
    let bh = sample_fbm(grid, hurst, config, seed)?;
    let values: Vec<f64> = w
        .values
        .iter()
        .zip(&bh.values)
        .map(|(a, b)| a + b)
        .collect();
    let xi = SamplePath::new(*grid, values, PathLabel::Mfbm, seed)?;
    Ok((w, bh, xi))
}
