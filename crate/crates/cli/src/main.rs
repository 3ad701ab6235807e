//! `mixou` — simulate mixed fractional OU paths, estimate the drift, check
//! the kernel equation and reproduce the Monte Carlo tables.
//!
//! Exit codes: 0 success, 2 argument error, 3 numerical error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mixou::{
    cir_drift_estimator, emit_report, ergodic_estimator_path, identity_report, lse_nonergodic,
    lse_oracle, run_experiment, run_phi, sample_mixed, simulate_mcir, simulate_mou, solve_g,
    summarize, CirParams, Error, EstimateResult, ExperimentSpec, GeneratorConfig, HurstParam,
    Method, ModelParams, PathLabel, PhiExperiment, Report, ReportFormat, SamplePath,
};

#[derive(Parser)]
#[command(
    name = "mixou",
    version,
    about = "mixed fractional Ornstein-Uhlenbeck toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a process path and write it as `t,value` CSV.
    Simulate(SimulateArgs),
    /// Estimate the drift from a path CSV, or check the pathwise identities.
    Estimate(EstimateArgs),
    /// Solve the kernel equation and print its diagnostics as JSON.
    KernelCheck(KernelArgs),
    /// Run a Monte Carlo table from a config file.
    Table(TableArgs),
    /// Sample the scaled estimation-error statistic and summarize it.
    Phi(PhiArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Process to simulate: mou, mcir or mfbm.
    #[arg(long)]
    process: String,
    #[arg(long = "H")]
    hurst: f64,
    /// Drift parameter (mou) or growth parameter a (mcir).
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long = "T")]
    t_horizon: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generator: cholesky or circulant.
    #[arg(long, default_value = "circulant")]
    method: String,
    /// Initial value (mou: X_0, mcir: X̃_0 > 0).
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Path CSV produced by `simulate`.
    #[arg(long = "in", required_unless_present = "check_identities")]
    input: Option<PathBuf>,
    #[arg(long = "H")]
    hurst: f64,
    /// Estimator: ergodic, lse, oracle or cir.
    #[arg(long, default_value = "ergodic")]
    method: String,
    /// True drift, required by the oracle expression.
    #[arg(long = "theta-true")]
    theta_true: Option<f64>,
    /// Simulate a path internally and emit the integral-identity block.
    #[arg(long, default_value_t = false)]
    check_identities: bool,
    /// Identity-check simulation parameters.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long = "T", default_value_t = 5.0)]
    t_horizon: f64,
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long = "H")]
    hurst: f64,
    #[arg(long = "T")]
    t_horizon: f64,
    #[arg(long)]
    m: usize,
    /// Optional CSV dump of the solved g(s,t) grid.
    #[arg(long)]
    dump_g: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// TOML config with keys H[], theta[], T[], delta[], reps, seed, method, estimator.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long = "H")]
    hurst: f64,
    #[arg(long)]
    theta: f64,
    #[arg(long = "T")]
    t_horizon: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> mixou::Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::KernelCheck(a) => kernel_check(a),
        Command::Table(a) => table(a),
        Command::Phi(a) => phi(a),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> mixou::Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("json encoding: {e}")))?;
    println!("{text}");
    Ok(())
}

fn simulate(a: SimulateArgs) -> mixou::Result<()> {
    let hurst = HurstParam::new(a.hurst)?;
    let method: Method = a.method.parse()?;
    let config = GeneratorConfig {
        method,
        master_seed: a.seed,
        ..Default::default()
    };
    match a.process.as_str() {
        "mfbm" => {
            let grid = mixou::TimeGrid::from_horizon(a.n, a.t_horizon)?;
            let (_, _, xi) = sample_mixed(&grid, &hurst, &config, a.seed)?;
            xi.save_csv(&a.out)?;
        }
        "mou" => {
            let params = ModelParams::new(hurst, a.theta, a.t_horizon, a.n, a.x0)?;
            let x = simulate_mou(&params, &config, a.seed)?;
            x.save_csv(&a.out)?;
        }
        "mcir" => {
            // --x0 defaults to 0 for the OU start; the CIR start must be positive
            let x0 = if a.x0 == 0.0 { 1.0 } else { a.x0 };
            let cir = CirParams::new(a.theta, x0)?;
            let params = ModelParams::new(hurst, 0.0, a.t_horizon, a.n, 0.0)?;
            let m = simulate_mcir(&cir, &params, &config, a.seed)?;
            m.path.save_csv(&a.out)?;
            if let Some(tau) = m.tau {
                eprintln!("note: path absorbed at tau = {tau}");
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown process `{other}` (expected mou, mcir or mfbm)"
            )))
        }
    }
    Ok(())
}

fn estimate(a: EstimateArgs) -> mixou::Result<()> {
    let hurst = HurstParam::new(a.hurst)?;
    if a.check_identities {
        let params = ModelParams::new(hurst, a.theta, a.t_horizon, a.n, 0.0)?;
        let config = GeneratorConfig {
            master_seed: a.seed,
            ..Default::default()
        };
        let (_, _, xi) = sample_mixed(&params.grid(), &hurst, &config, a.seed)?;
        let x = mixou::euler_mou(&params, &xi)?;
        let report = identity_report(&x, &xi, a.theta, &hurst)?;
        return print_json(&report);
    }
    let input = a
        .input
        .expect("clap enforces --in without --check-identities");
    let result: EstimateResult = match a.method.as_str() {
        "ergodic" => {
            let x = SamplePath::load_csv(&input, PathLabel::Mou)?;
            ergodic_estimator_path(&x, &hurst)?
        }
        "lse" => {
            let x = SamplePath::load_csv(&input, PathLabel::Mou)?;
            lse_nonergodic(&x)?
        }
        "oracle" => {
            let theta_true = a.theta_true.ok_or_else(|| {
                Error::InvalidArgument("the oracle expression needs --theta-true".into())
            })?;
            let x = SamplePath::load_csv(&input, PathLabel::Mou)?;
            lse_oracle(&x, theta_true, &hurst)?
        }
        "cir" => {
            let x = SamplePath::load_csv(&input, PathLabel::Mcir)?;
            cir_drift_estimator(&x)?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown estimator `{other}` (expected ergodic, lse, oracle or cir)"
            )))
        }
    };
    print_json(&result)
}

fn kernel_check(a: KernelArgs) -> mixou::Result<()> {
    let hurst = HurstParam::new(a.hurst)?;
    let mut sol = solve_g(a.t_horizon, &hurst, a.m)?;
    let check = sol.check()?;
    if let Some(path) = a.dump_g {
        let f = std::fs::File::create(path)?;
        sol.write_g_csv(std::io::BufWriter::new(f))?;
    }
    print_json(&check)
}

fn table(a: TableArgs) -> mixou::Result<()> {
    let text = std::fs::read_to_string(&a.config)?;
    let spec = ExperimentSpec::from_toml_str(&text)?;
    let format: ReportFormat = a.format.parse()?;
    let outcomes = run_experiment(&spec)?;
    let summary = summarize(&outcomes)?;
    let bytes = emit_report(Report::Table(&summary), format)?;
    let mut f = std::fs::File::create(&a.out)?;
    f.write_all(&bytes)?;
    Ok(())
}

fn phi(a: PhiArgs) -> mixou::Result<()> {
    let exp = PhiExperiment {
        h: a.hurst,
        theta: a.theta,
        t: a.t_horizon,
        delta: a.delta,
        reps: a.reps,
        seed: a.seed,
        method: Method::Circulant,
    };
    let report = run_phi(&exp)?;
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Numerical(format!("json encoding: {e}")))?;
    std::fs::write(&a.out, text.as_bytes())?;
    println!("{}", serde_json::to_string_pretty(&report.stats).unwrap());
    Ok(())
}
