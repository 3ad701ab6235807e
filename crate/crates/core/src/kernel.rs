//! The weakly singular kernel equation of the fundamental martingale:
//!
//!   g(s,t) + α_H ∫_0^t g(r,t) |r−s|^{2H−2} dr = 1,
//!
//! solved column-by-column with a Nyström scheme whose singular factor is
//! integrated in closed form over each grid cell (product integration), plus
//! the derived quadratic variation ⟨M⟩, the kernels R, G, 𝒢 = g(s,s)G(s,t),
//! and the factorization check ∫_0^{min} 𝒢(u,s)𝒢(u,t) du against the mixed
//! covariance.
//!
//! With α = 0 the integral operator is switched off and everything collapses
//! to the Brownian case (g ≡ 1, ⟨M⟩_t = t, 𝒢 ≡ 1, covariance min(s,t)),
//! which the tests assert at machine precision.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, numerical, Result};
use crate::gaussgen::HurstParam;
use crate::linalg::lu_solve;

/// Discretized kernel solution on the uniform grid s_i = i·T/m.
#[derive(Debug, Clone)]
pub struct KernelSolution {
    pub t_horizon: f64,
    pub m: usize,
    /// Hurst exponent used for the covariance target.
    pub h: f64,
    /// Kernel constant actually used (α_H, or 0 in the degenerate mode).
    pub alpha: f64,
    /// `gmat[i][j]` = g(s_i, t_j) on the full grid, columns solved for s ≤ t
    /// and extended explicitly beyond the triangle.
    pub gmat: Vec<Vec<f64>>,
    /// ⟨M⟩(t_j) from ∫_0^{t_j} g(s,t_j) ds.
    pub qv_m: Vec<f64>,
    /// ⟨M⟩(t_j) from ∫_0^{t_j} g(s,s)² ds.
    pub qv_m_alt: Vec<f64>,
    /// Max collocation residual of the discrete systems.
    pub residual: f64,
    /// R(s_i,t_j) = ġ(s_i,t_j)/g(t_j,t_j); filled by [`KernelSolution::compute_calg`].
    pub rmat: Vec<Vec<f64>>,
    /// G(s_i,t_j); filled by `compute_calg`.
    pub gcap: Vec<Vec<f64>>,
    /// 𝒢(s_i,t_j) = g(s_i,s_i) G(s_i,t_j); filled by `compute_calg`.
    pub calg: Vec<Vec<f64>>,
}

/// Summary emitted by the CLI `kernel-check` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelCheck {
    pub h: f64,
    pub t_horizon: f64,
    pub m: usize,
    pub residual: f64,
    pub qv_discrepancy: f64,
    pub property_g_deviation: f64,
}

/// ∫_a^b |r−s|^{β−1} dr in closed form, β = 2H−1 ∈ (0,1).
fn singular_cell_moment(a: f64, b: f64, s: f64, beta: f64) -> f64 {
    let f = |x: f64| {
        let d = x - s;
        d.signum() * d.abs().powf(beta) / beta
    };
    f(b) - f(a)
}

/// Solve the kernel equation with an explicit kernel constant.
/// `solve_g` passes α_H; passing 0 exercises the Brownian degeneration.
pub fn solve_g_with_alpha(t_horizon: f64, h: f64, alpha: f64, m: usize) -> Result<KernelSolution> {
    if m < 8 {
        return Err(invalid(format!("kernel grid m = {m} must be at least 8")));
    }
    if !(t_horizon > 0.0) {
        return Err(invalid(format!("horizon {t_horizon} must be positive")));
    }
    if !(h > 0.5 && h < 1.0) {
        return Err(invalid(format!("kernel solve needs H in (1/2,1), got {h}")));
    }
    if alpha < 0.0 {
        return Err(invalid(format!(
            "kernel constant alpha = {alpha} must be nonnegative"
        )));
    }
    let step = t_horizon / m as f64;
    let beta = 2.0 * h - 1.0;
    let s_at = |i: usize| i as f64 * step;

    let mut gmat = vec![vec![1.0; m + 1]; m + 1]; // column t_0 = 0 is identically 1
    let mut residual: f64 = 0.0;

    for j in 1..=m {
        // Moments F[i][l] = alpha * ∫_{s_l}^{s_{l+1}} |r−s_i|^{2H−2} dr, cells l < j.
        // Collocation at s_0..s_j with the cell value split between its nodes.
        let dim = j + 1;
        let mut a = vec![vec![0.0; dim]; dim];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
            if alpha == 0.0 {
                continue;
            }
            let si = s_at(i);
            for l in 0..j {
                let w = alpha * singular_cell_moment(s_at(l), s_at(l + 1), si, beta);
                row[l] += 0.5 * w;
                row[l + 1] += 0.5 * w;
            }
        }
        let col = lu_solve(a.clone(), vec![1.0; dim])
            .map_err(|e| numerical(format!("kernel column t_{j}: {e}")))?;
        for row in &a {
            let r: f64 = row.iter().zip(&col).map(|(aij, gj)| aij * gj).sum::<f64>() - 1.0;
            residual = residual.max(r.abs());
        }
        for i in 0..=j {
            gmat[i][j] = col[i];
        }
        // Explicit extension beyond the triangle: the unknowns under the
        // integral only involve r in [0, t_j].
        for i in j + 1..=m {
            let si = s_at(i);
            let mut acc = 0.0;
            if alpha > 0.0 {
                for l in 0..j {
                    let w = alpha * singular_cell_moment(s_at(l), s_at(l + 1), si, beta);
                    acc += 0.5 * w * (col[l] + col[l + 1]);
                }
            }
            gmat[i][j] = 1.0 - acc;
        }
    }

    let trap = |vals: &[f64]| -> f64 {
        if vals.len() < 2 {
            return 0.0;
        }
        let inner: f64 = vals[1..vals.len() - 1].iter().sum();
        step * (0.5 * vals[0] + inner + 0.5 * vals[vals.len() - 1])
    };
    let diag_sq: Vec<f64> = (0..=m).map(|i| gmat[i][i] * gmat[i][i]).collect();
    let mut qv_m = Vec::with_capacity(m + 1);
    let mut qv_m_alt = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let col: Vec<f64> = (0..=j).map(|i| gmat[i][j]).collect();
        qv_m.push(trap(&col));
        qv_m_alt.push(trap(&diag_sq[..=j]));
    }

    Ok(KernelSolution {
        t_horizon,
        m,
        h,
        alpha,
        gmat,
        qv_m,
        qv_m_alt,
        residual,
        rmat: Vec::new(),
        gcap: Vec::new(),
        calg: Vec::new(),
    })
}

/// Solve the kernel equation for the given Hurst parameter.
pub fn solve_g(t_horizon: f64, hurst: &HurstParam, m: usize) -> Result<KernelSolution> {
    solve_g_with_alpha(t_horizon, hurst.h(), hurst.alpha(), m)
}

impl KernelSolution {
    fn step(&self) -> f64 {
        self.t_horizon / self.m as f64
    }

    /// Grid node s_i = i·T/m.
    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    fn trap(&self, vals: &[f64]) -> f64 {
        if vals.len() < 2 {
            return 0.0;
        }
        let inner: f64 = vals[1..vals.len() - 1].iter().sum();
        self.step() * (0.5 * vals[0] + inner + 0.5 * vals[vals.len() - 1])
    }

    /// Max discrepancy between the two ⟨M⟩ formulas, a discretization
    /// diagnostic (first-order in the grid step).
    pub fn qv_discrepancy(&self) -> f64 {
        self.qv_m
            .iter()
            .zip(&self.qv_m_alt)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Fill R, G and 𝒢 from the solved grid. ġ is taken by central
    /// differences in t (one-sided at the ends); G integrates R(τ,s) =
    /// ġ(τ,s)/g(s,s) over τ ∈ `[0,t]`, the convention under which the
    /// factorization check below converges.
    pub fn compute_calg(&mut self) -> Result<()> {
        let m = self.m;
        let step = self.step();
        let mut gdot = vec![vec![0.0; m + 1]; m + 1];
        for i in 0..=m {
            gdot[i][0] = (self.gmat[i][1] - self.gmat[i][0]) / step;
            gdot[i][m] = (self.gmat[i][m] - self.gmat[i][m - 1]) / step;
            for j in 1..m {
                gdot[i][j] = (self.gmat[i][j + 1] - self.gmat[i][j - 1]) / (2.0 * step);
            }
        }
        let diag: Vec<f64> = (0..=m).map(|i| self.gmat[i][i]).collect();
        if let Some((i, _)) = diag.iter().enumerate().find(|(_, d)| d.abs() <= 1e-12) {
            return Err(numerical(format!(
                "g(t,t) vanishes at node {i}; cannot normalize"
            )));
        }
        let mut rmat = vec![vec![0.0; m + 1]; m + 1];
        for i in 0..=m {
            for j in 0..=m {
                rmat[i][j] = gdot[i][j] / diag[j];
            }
        }
        let mut gcap = vec![vec![0.0; m + 1]; m + 1];
        let mut calg = vec![vec![0.0; m + 1]; m + 1];
        for i in 0..=m {
            // cumulative trapezoid of tau -> gdot[tau][i] along the first slot
            let col: Vec<f64> = (0..=m).map(|l| gdot[l][i]).collect();
            let mut cum = 0.0;
            gcap[i][0] = 1.0;
            calg[i][0] = diag[i];
            for j in 1..=m {
                cum += 0.5 * step * (col[j - 1] + col[j]);
                gcap[i][j] = 1.0 - cum / (diag[i] * diag[i]);
                calg[i][j] = diag[i] * gcap[i][j];
            }
        }
        self.rmat = rmat;
        self.gcap = gcap;
        self.calg = calg;
        Ok(())
    }

    /// Covariance the factorization must reproduce: the mixed covariance for
    /// a live kernel constant, min(s,t) in the Brownian degeneration.
    fn target_cov(&self, s: f64, t: f64) -> f64 {
        if self.alpha == 0.0 {
            s.min(t)
        } else {
            let two_h = 2.0 * self.h;
            s.min(t) + 0.5 * (s.powf(two_h) + t.powf(two_h) - (t - s).abs().powf(two_h))
        }
    }

    /// Max over grid pairs of |∫_0^{min(s,t)} 𝒢(u,s)𝒢(u,t) du − R_H(t,s)|.
    pub fn check_property_g(&self) -> Result<f64> {
        if self.calg.is_empty() {
            return Err(invalid("call compute_calg before check_property_g"));
        }
        let m = self.m;
        let mut dev: f64 = 0.0;
        let mut prod = vec![0.0; m + 1];
        for a in 1..=m {
            for b in a..=m {
                for (u, slot) in prod.iter_mut().enumerate().take(a + 1) {
                    *slot = self.calg[u][a] * self.calg[u][b];
                }
                let lhs = self.trap(&prod[..=a]);
                let rhs = self.target_cov(self.point(a), self.point(b));
                dev = dev.max((lhs - rhs).abs());
            }
        }
        Ok(dev)
    }

    /// Bundle of the diagnostics reported by the CLI.
    pub fn check(&mut self) -> Result<KernelCheck> {
        if self.calg.is_empty() {
            self.compute_calg()?;
        }
        Ok(KernelCheck {
            h: self.h,
            t_horizon: self.t_horizon,
            m: self.m,
            residual: self.residual,
            qv_discrepancy: self.qv_discrepancy(),
            property_g_deviation: self.check_property_g()?,
        })
    }

    /// Dump g(s,t) as CSV: header `s,t,g`, row-major over the grid.
    pub fn write_g_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "s,t,g")?;
        for i in 0..=self.m {
            for j in 0..=self.m {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e}",
                    self.point(i),
                    self.point(j),
                    self.gmat[i][j]
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_alpha_zero_collapses_to_brownian_case() {
        let mut sol = solve_g_with_alpha(1.0, 0.6, 0.0, 16).unwrap();
        for i in 0..=16 {
            for j in 0..=16 {
                assert_eq!(sol.gmat[i][j], 1.0);
            }
        }
        assert_eq!(sol.residual, 0.0);
        for j in 0..=16 {
            let t = sol.point(j);
            assert!((sol.qv_m[j] - t).abs() < 1e-14);
            assert!((sol.qv_m_alt[j] - t).abs() < 1e-14);
        }
        sol.compute_calg().unwrap();
        for i in 0..=16 {
            for j in 0..=16 {
                assert_eq!(sol.rmat[i][j], 0.0);
                assert_eq!(sol.gcap[i][j], 1.0);
                assert_eq!(sol.calg[i][j], 1.0);
            }
        }
        // ∫_0^{min} 1 du = min(s,t) exactly, so the deviation is pure rounding
        let dev = sol.check_property_g().unwrap();
        assert!(dev < 1e-13, "deviation {dev}");
    }

    #[test]
    fn solved_g_is_in_unit_interval_with_tiny_residual() {
        for h_val in [0.6, 0.8] {
            let h = HurstParam::new(h_val).unwrap();
            let sol = solve_g(1.0, &h, 32).unwrap();
            assert!(sol.residual <= 1e-8, "H={h_val}: residual {}", sol.residual);
            for j in 0..=32 {
                for i in 0..=j {
                    let g = sol.gmat[i][j];
                    assert!(g > 0.0 && g <= 1.0 + 1e-12, "H={h_val}: g[{i}][{j}] = {g}");
                }
            }
        }
    }

    #[test]
    fn qv_is_zero_at_origin_and_nondecreasing() {
        let h = HurstParam::new(0.7).unwrap();
        let sol = solve_g(2.0, &h, 24).unwrap();
        assert_eq!(sol.qv_m[0], 0.0);
        assert_eq!(sol.qv_m_alt[0], 0.0);
        for j in 1..=24 {
            assert!(sol.qv_m_alt[j] >= sol.qv_m_alt[j - 1]);
            assert!(sol.qv_m[j] >= sol.qv_m[j - 1] - 1e-12);
        }
    }

    #[test]
    fn qv_formulas_agree_better_under_refinement() {
        let h = HurstParam::new(0.6).unwrap();
        let d16 = solve_g(1.0, &h, 16).unwrap().qv_discrepancy();
        let d32 = solve_g(1.0, &h, 32).unwrap().qv_discrepancy();
        let d64 = solve_g(1.0, &h, 64).unwrap().qv_discrepancy();
        assert!(d32 < d16 / 1.8, "{d16} -> {d32}");
        assert!(d64 < d32 / 1.8, "{d32} -> {d64}");
    }

    #[test]
    fn g_self_convergence_under_grid_doubling() {
        let h = HurstParam::new(0.6).unwrap();
        let sols: Vec<KernelSolution> = [16usize, 32, 64]
            .iter()
            .map(|&m| solve_g(1.0, &h, m).unwrap())
            .collect();
        let mut prev = f64::INFINITY;
        for w in sols.windows(2) {
            let (coarse, fine) = (&w[0], &w[1]);
            let mut diff: f64 = 0.0;
            for i in 0..=coarse.m {
                for j in 0..=coarse.m {
                    diff = diff.max((coarse.gmat[i][j] - fine.gmat[2 * i][2 * j]).abs());
                }
            }
            // max-norm decay is slow near the endpoint layers (exponent 2H−1);
            // monotone decay is what the scheme guarantees pointwise.
            assert!(diff < prev, "no decay: {diff} vs {prev}");
            prev = diff;
        }
    }

    #[test]
    fn diagonal_of_g_times_gcap_is_finite_positive() {
        let h = HurstParam::new(0.6).unwrap();
        let mut sol = solve_g(1.0, &h, 16).unwrap();
        sol.compute_calg().unwrap();
        for i in 0..=16 {
            let v = sol.gcap[i][i] * sol.gmat[i][i];
            assert!(v.is_finite() && v > 0.0, "G(s,s)g(s,s) = {v} at {i}");
        }
    }

    #[test]
    fn property_g_deviation_halves_under_refinement() {
        let h = HurstParam::new(0.6).unwrap();
        let mut s16 = solve_g(1.0, &h, 16).unwrap();
        let mut s32 = solve_g(1.0, &h, 32).unwrap();
        s16.compute_calg().unwrap();
        s32.compute_calg().unwrap();
        let d16 = s16.check_property_g().unwrap();
        let d32 = s32.check_property_g().unwrap();
        assert!(d16 > 0.0 && d32 > 0.0);
        assert!(d32 <= d16 / 1.9, "order below 1: {d16} -> {d32}");
    }

    #[test]
    fn check_requires_compute_calg_first() {
        let h = HurstParam::new(0.6).unwrap();
        let sol = solve_g(1.0, &h, 16).unwrap();
        assert!(sol.check_property_g().is_err());
    }

    #[test]
    fn solve_rejects_bad_arguments() {
        let h = HurstParam::new(0.6).unwrap();
        assert!(solve_g(1.0, &h, 4).is_err());
        assert!(solve_g(-1.0, &h, 16).is_err());
        assert!(solve_g_with_alpha(1.0, 1.2, 0.1, 16).is_err());
    }
}
