//! CLI-level acceptance checks: determinism of artifacts, exit-code
//! contract, report round-tripping, and the describing-function contrast
//! exercised through the `compare` command.

use std::path::Path;
use std::process::{Command, Output};

fn limitcycle(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_limitcycle"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn criterion_7_determinism_byte_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "solve", "--K", "1.5", "--period", "7.0964", "--n", "800", "--lambda", "0.05",
    ];
    for run in ["a", "b"] {
        let out = limitcycle(
            &[&args[..], &["--out-dir", run]].concat(),
            tmp.path(),
        );
        assert!(out.status.success(), "solve failed: {out:?}");
    }
    let wave_a = read(&tmp.path().join("a"), "waveform.csv");
    let wave_b = read(&tmp.path().join("b"), "waveform.csv");
    assert_eq!(wave_a, wave_b, "waveform.csv differs between identical runs");

    // report.json matches except for the wall-clock field and the out-dir
    // echo (deliberately different here so the runs do not collide).
    let mut ra: serde_json::Value = serde_json::from_str(&read(&tmp.path().join("a"), "report.json")).unwrap();
    let mut rb: serde_json::Value = serde_json::from_str(&read(&tmp.path().join("b"), "report.json")).unwrap();
    for r in [&mut ra, &mut rb] {
        r["wall_clock_seconds"] = 0.0.into();
        r["config"]["out_dir"] = "".into();
    }
    assert_eq!(ra, rb, "report.json differs beyond wall clock");
    println!("criterion 7 PASS: byte-identical waveform.csv across reruns");
}

#[test]
fn report_json_round_trip_is_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let out = limitcycle(
        &["solve", "--K", "0", "--init", "zero", "--period", "6.2832", "--n", "64", "--out-dir", "."],
        tmp.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let text = read(tmp.path(), "report.json");
    let normalize = |t: &str| {
        let v: serde_json::Value = serde_json::from_str(t).unwrap();
        serde_json::to_string_pretty(&v).unwrap()
    };
    let once = normalize(&text);
    let twice = normalize(&once);
    assert_eq!(once, twice);
}

#[test]
fn waveform_csv_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let out = limitcycle(
        &["solve", "--K", "0", "--init", "zero", "--period", "4.0", "--n", "100", "--out-dir", "."],
        tmp.path(),
    );
    assert!(out.status.success());
    let text = read(tmp.path(), "waveform.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value"));
    assert_eq!(lines.count(), 100);
    assert!(!text.contains('\r'), "expected LF line endings");
    // t = k * h at 12 significant digits.
    let second_row = text.lines().nth(2).unwrap();
    let t: f64 = second_row.split(',').next().unwrap().parse().unwrap();
    assert!((t - 0.04).abs() < 1e-12);
}

#[test]
fn exit_codes_cover_the_contract() {
    let tmp = tempfile::tempdir().unwrap();

    // 0: success.
    let ok = limitcycle(&["scalar", "--init", "0.3", "--out-dir", "."], tmp.path());
    assert_eq!(ok.status.code(), Some(0));

    // 1: bad configuration, message names the field.
    let bad = limitcycle(&["solve", "--period", "bogus"], tmp.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("period"));

    let bad_n = limitcycle(&["solve", "--n", "2", "--period", "6.28"], tmp.path());
    assert_eq!(bad_n.status.code(), Some(1));

    // 2: non-convergence still writes artifacts with converged = false.
    let nc_dir = tmp.path().join("nc");
    let nc = limitcycle(
        &[
            "solve", "--K", "1.5", "--period", "9.0", "--n", "400", "--max-outer", "8",
            "--out-dir", "nc",
        ],
        tmp.path(),
    );
    assert_eq!(nc.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&read(&nc_dir, "report.json")).unwrap();
    assert_eq!(report["converged"], serde_json::Value::Bool(false));
    assert!(nc_dir.join("waveform.csv").exists());

    // 3: resonance names the offending frequency.
    let sysdef = tmp.path().join("resonant.toml");
    std::fs::write(
        &sysdef,
        "[lti]\nnumerator = [-1.0]\ndenominator = [1.0]\n[e1]\ncoefficients = [0.0, 1.0]\n[e2]\ngain = 0.0\n",
    )
    .unwrap();
    let resonant = limitcycle(
        &[
            "solve", "--system", "resonant.toml", "--period", "6.28", "--n", "64",
            "--lambda", "1.0",
        ],
        tmp.path(),
    );
    assert_eq!(resonant.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&resonant.stderr).contains("rad/s"));
}

#[test]
fn scalar_command_reproduces_double_well() {
    let tmp = tempfile::tempdir().unwrap();
    for (init, expected) in [("0.3", 1.7321), ("-0.3", -1.7321), ("0", 0.0)] {
        let dir = format!("s{init}");
        let out = limitcycle(&["scalar", "--init", init, "--out-dir", &dir], tmp.path());
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        let text = read(&tmp.path().join(&dir), "trajectory.csv");
        assert!(text.starts_with("iteration,x\n"));
        let last: f64 = text
            .lines()
            .last()
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert!(
            (last - expected).abs() <= 1e-4,
            "init {init}: final {last} vs {expected}"
        );
    }
}

#[test]
fn oracle_command_writes_features() {
    let tmp = tempfile::tempdir().unwrap();
    let out = limitcycle(
        &[
            "oracle", "--K", "0", "--x0", "1", "--step", "1e-3", "--t-end", "130",
            "--n", "256", "--out-dir", ".",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let features: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "features.json")).unwrap();
    let amplitude = features["amplitude"].as_f64().unwrap();
    let period = features["period"].as_f64().unwrap();
    assert!((amplitude - 1.0).abs() < 1e-3);
    assert!((period - 2.0 * std::f64::consts::PI).abs() < 1e-3);
    assert!(tmp.path().join("waveform.csv").exists());
}

#[test]
fn compare_command_shows_describing_function_contrast_at_k10() {
    let tmp = tempfile::tempdir().unwrap();
    // Reduced N keeps the run quick; the contrast is N-independent.
    let out = limitcycle(
        &["compare", "--K", "10", "--n", "1000", "--out-dir", "."],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let cmp: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "comparison.json")).unwrap();
    let rms = cmp["solver_vs_oracle_rms"].as_f64().unwrap();
    let df_err = cmp["df_period_error"].as_f64().unwrap();
    let solver_err = cmp["solver_period_error"].as_f64().unwrap();
    assert!(rms < 0.05, "rms {rms}");
    assert!(df_err > 0.50, "df period error {df_err}");
    assert!(solver_err < 0.10, "solver period error {solver_err}");
    assert!(tmp.path().join("solver_waveform.csv").exists());
    assert!(tmp.path().join("oracle_waveform.csv").exists());
    println!(
        "compare K=10: rms {rms:.4}, DF period error {:.1}%, solver {:.2}%",
        100.0 * df_err,
        100.0 * solver_err
    );
}

#[test]
fn compare_small_k_all_methods_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let out = limitcycle(
        &["compare", "--K", "0.0002", "--n", "800", "--step", "1e-3", "--out-dir", "."],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let cmp: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "comparison.json")).unwrap();
    for method in ["solver", "oracle", "describing_function"] {
        let amplitude = cmp[method]["amplitude"].as_f64().unwrap();
        let period = cmp[method]["period"].as_f64().unwrap();
        assert!((amplitude - 2.0).abs() < 0.05, "{method} amplitude {amplitude}");
        assert!(
            (period - 2.0 * std::f64::consts::PI).abs() < 0.05,
            "{method} period {period}"
        );
    }
}
