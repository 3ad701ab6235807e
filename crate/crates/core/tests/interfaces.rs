//! File-format and report-surface tests: path CSV, summary CSV/JSON, the
//! shipped JSON schema, and property-based invariants.

use mixou::*;
use proptest::prelude::*;

#[test]
fn path_csv_roundtrip_through_disk() {
    let h = HurstParam::new(0.7).unwrap();
    let p = sample_fbm_circulant(128, 1.0 / 128.0, &h, 31).unwrap();
    let dir = std::env::temp_dir().join(format!("mixou-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("path.csv");
    p.save_csv(&file).unwrap();
    let q = SamplePath::load_csv(&file, PathLabel::Fbm).unwrap();
    assert_eq!(p.values, q.values);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn path_csv_has_header_and_full_precision() {
    let h = HurstParam::new(0.6).unwrap();
    let p = sample_fbm_circulant(4, 0.25, &h, 1).unwrap();
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,value");
    // 17 significant digits = 1 leading + 16 fractional in scientific notation
    let row = lines.next().unwrap();
    let value = row.split(',').nth(1).unwrap();
    let frac = value.split('e').next().unwrap();
    let digits = frac.trim_start_matches('-').replace('.', "");
    assert_eq!(digits.len(), 17, "row {row}");
}

#[test]
fn summary_json_validates_against_shipped_schema() {
    let schema_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schemas/report.schema.json"
    ))
    .unwrap();
    let schema: serde_json::Value = serde_json::from_str(&schema_text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();

    let spec = ExperimentSpec {
        h: vec![0.6],
        theta: vec![0.5],
        t: vec![2.0],
        delta: vec![0.1],
        reps: 3,
        seed: 9,
        method: Method::Circulant,
        estimator: EstimatorChoice::Ergodic,
    };
    let table = summarize(&run_experiment(&spec).unwrap()).unwrap();
    let bytes = emit_report(Report::Table(&table), ReportFormat::Json).unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");

    // a missing-cell marker must also validate (mean/sdev null)
    let missing = SummaryTable {
        schema_version: 1,
        rows: vec![SummaryRow {
            h: 0.6,
            theta_true: 0.5,
            t: 2.0,
            delta: 0.1,
            l: 10,
            mean: None,
            sdev: None,
        }],
    };
    let bytes = emit_report(Report::Table(&missing), ReportFormat::Json).unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert!(validator.is_valid(&doc));
}

#[test]
fn stats_report_formats() {
    let stats = histogram_stats(&[0.5, -0.25, 1.0, 0.75, -1.5]).unwrap();
    let csv = emit_report(Report::Stats(&stats), ReportFormat::Csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("mean,median,sdev,skewness,kurtosis\n"));
    assert_eq!(text.lines().count(), 2);
    let js = emit_report(Report::Stats(&stats), ReportFormat::Json).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&js).unwrap();
    assert!(v["kurtosis"].is_number());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Trapezoid integration is exact on affine functions for any grid.
    #[test]
    fn trapezoid_exact_on_affine(
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        n in 2usize..400,
        delta in 1e-4f64..0.5,
    ) {
        let values: Vec<f64> = (0..=n).map(|i| a + b * (i as f64 * delta)).collect();
        let t = n as f64 * delta;
        let want = a * t + 0.5 * b * t * t;
        let got = trapezoid_values(&values, delta).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    /// The non-ergodic LSE is invariant under path scaling.
    #[test]
    fn lse_scale_invariance(c in prop::sample::select(vec![-3.0f64, -0.5, 0.1, 2.0, 10.0]), seed in 0u64..50) {
        let h = HurstParam::new(0.65).unwrap();
        let p = ModelParams::new(h, -0.2, 2.0, 64, 0.0).unwrap();
        let cfg = GeneratorConfig::default();
        let x = simulate_mou(&p, &cfg, seed).unwrap();
        let scaled = SamplePath::new(
            x.grid,
            x.values.iter().map(|v| c * v).collect(),
            x.label,
            x.seed,
        ).unwrap();
        let a = lse_nonergodic(&x).unwrap().value;
        let b = lse_nonergodic(&scaled).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    /// p is strictly decreasing wherever sampled.
    #[test]
    fn p_monotone(h in 0.51f64..0.99, lo in 0.01f64..5.0, gap in 0.01f64..5.0) {
        let hurst = HurstParam::new(h).unwrap();
        let hi = lo + gap;
        prop_assert!(p_func(lo, &hurst).unwrap() > p_func(hi, &hurst).unwrap());
    }

    /// Path CSV round-trips bit-exactly for arbitrary finite values.
    #[test]
    fn path_csv_roundtrip_bits(values in prop::collection::vec(-1e12f64..1e12, 2..60), delta in 1e-6f64..10.0) {
        let n = values.len() - 1;
        let grid = TimeGrid::new(n, delta).unwrap();
        let p = SamplePath::new(grid, values, PathLabel::Mou, 0).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = SamplePath::read_csv(std::io::BufReader::new(buf.as_slice()), PathLabel::Mou).unwrap();
        prop_assert_eq!(p.values, q.values);
    }

    /// Symmetric − forward = Σ ΔuΔξ holds for arbitrary value arrays, not
    /// just simulated ones.
    #[test]
    fn sym_minus_fwd_is_cross(u in prop::collection::vec(-100.0f64..100.0, 2..50)) {
        let n = u.len() - 1;
        let grid = TimeGrid::new(n, 0.1).unwrap();
        let xi_vals: Vec<f64> = u.iter().map(|v| v.sin() * 3.0 + 0.5 * v).collect();
        let up = SamplePath::new(grid, u, PathLabel::Mou, 0).unwrap();
        let xp = SamplePath::new(grid, xi_vals, PathLabel::Mfbm, 0).unwrap();
        let s = symmetric_integral(&up, &xp).unwrap().value;
        let f = forward_integral(&up, &xp).unwrap().value;
        let c = cross_variation(&up, &xp).unwrap();
        prop_assert!(((s - f) - c).abs() <= 1e-9 * (1.0 + s.abs() + f.abs() + c.abs()));
    }
}
