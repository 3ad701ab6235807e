//! Simulation and drift estimation for the Ornstein-Uhlenbeck process driven
//! by mixed fractional Brownian motion ξ = W + B^H, H ∈ (1/2, 1).
//!
//! The crate covers the full desk-scale pipeline:
//!
//! * [`gaussgen`] — exact Gaussian path generation (Cholesky and FFT
//!   circulant embedding) for Brownian, fractional and mixed drivers;
//! * [`sde`] — Euler schemes for the mixed OU process, its stationary
//!   variant and the mixed CIR process;
//! * [`stochint`] — discrete pathwise integrals, quadratic variation, the
//!   memory correction term and the Skorohod reconstruction;
//! * [`kernel`] — the weakly singular integral equation of the fundamental
//!   martingale and its factorization diagnostics;
//! * [`estimators`] — the ergodic p-inverse estimator, the non-ergodic least
//!   squares ratio, the infeasible oracle expression, the CIR drift
//!   estimator and the asymptotic scale constants;
//! * [`mc`] — the reproducible Monte Carlo harness, the Φ statistic and the
//!   CSV/JSON reports.

pub mod error;
pub mod estimators;
pub mod gaussgen;
pub mod kernel;
pub mod linalg;
pub mod mc;
pub mod rng;
pub mod sde;
pub mod special;
pub mod stochint;

pub use error::{Error, Result};
pub use estimators::{
    asymptotic_scales, cir_drift_estimator, ergodic_estimator, ergodic_estimator_path,
    lse_nonergodic, lse_oracle, p_func, p_inverse, sigma_h, AsymptoticScales, EstimateResult,
    EstimatorKind,
};
pub use gaussgen::{
    fbm_cov, mfbm_cov, sample_fbm, sample_fbm_cholesky, sample_fbm_circulant, sample_mixed,
    GeneratorConfig, HurstParam, Method, PathLabel, SamplePath, TimeGrid,
};
pub use kernel::{solve_g, solve_g_with_alpha, KernelCheck, KernelSolution};
pub use mc::{
    emit_report, histogram, histogram_stats, parse_table_csv, phi_statistic, run_experiment,
    run_phi, summarize, CellKey, CellOutcome, EstimatorChoice, ExperimentSpec, Histogram,
    PhiExperiment, PhiReport, PhiStats, Report, ReportFormat, SummaryRow, SummaryTable,
};
pub use sde::{
    euler_mou, simulate_mcir, simulate_mou, simulate_mou_stationary, CirParams, McirPath,
    ModelParams, StationaryMou,
};
pub use stochint::{
    cross_variation, drift_correction, forward_integral, identity_report, quadratic_variation,
    skorohod_xi_integral, symmetric_integral, trapezoid, trapezoid_values, IdentityReport,
    IntegralResult, Scheme,
};
