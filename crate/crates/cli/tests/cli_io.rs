//! Black-box tests of the `ripa` binary: exit codes, artifact hygiene
//! (nothing written on rejected configs), and byte-level determinism of the
//! CSV outputs.

use std::fs;
use std::path::Path;
use std::process::Output;

use tempfile::TempDir;

fn ripa(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_ripa"))
        .args(args)
        .output()
        .expect("binary must spawn")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn dir_entries(path: &Path) -> Vec<String> {
    match fs::read_dir(path) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect(),
        Err(_) => Vec::new(),
    }
}

const SMALL_FLOW: &str = r#"{
    "schema": 1,
    "name": "flow",
    "mode": "first_order_yosida",
    "operator": {"kind": "rotation2d"},
    "schedule": {"kind": "constant", "lambda": 10.0},
    "t0": 1.0,
    "t_end": 5.0,
    "x0": [10.0, 10.0]
}"#;

#[test]
fn malformed_json_exits_2_without_artifacts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\"schema\": 1, \"name\": ");
    let out_dir = dir.path().join("out");
    let out = ripa(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(!out_dir.exists(), "rejected config must not leave artifacts");
}

#[test]
fn schema_and_field_validation_exit_2() {
    let dir = TempDir::new().unwrap();
    let wrong_version = write_config(
        dir.path(),
        "v9.json",
        &SMALL_FLOW.replace("\"schema\": 1", "\"schema\": 9"),
    );
    assert_eq!(ripa(&["run", "--config", &wrong_version]).status.code(), Some(2));

    let missing_field = write_config(
        dir.path(),
        "no_x0.json",
        &SMALL_FLOW.replace("    \"x0\": [10.0, 10.0]\n", "    \"t_end\": 5.0\n"),
    );
    let out = ripa(&["run", "--config", &missing_field]);
    assert_eq!(out.status.code(), Some(2));

    let unknown_field = write_config(
        dir.path(),
        "extra.json",
        &SMALL_FLOW.replace("\"schema\": 1", "\"schema\": 1, \"stray\": true"),
    );
    let out = ripa(&["run", "--config", &unknown_field]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stray"));

    // contradictory: a discrete-only field on a flow
    let contradictory = write_config(
        dir.path(),
        "contra.json",
        &SMALL_FLOW.replace("\"t0\": 1.0,", "\"t0\": 1.0, \"s\": 1.0,"),
    );
    assert_eq!(ripa(&["run", "--config", &contradictory]).status.code(), Some(2));
}

#[test]
fn rejected_operator_exits_3_without_artifacts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "nonmono.json",
        r#"{
            "schema": 1,
            "name": "bad_op",
            "mode": "first_order_raw",
            "operator": {"kind": "affine", "matrix": [[-1.0]], "offset": [0.0]},
            "t0": 1.0,
            "t_end": 2.0,
            "x0": [1.0]
        }"#,
    );
    let out_dir = dir.path().join("out");
    let out = ripa(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("monotone"));
    assert!(!out_dir.exists());
}

#[test]
fn repeated_runs_write_identical_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "flow.json", SMALL_FLOW);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    assert_eq!(ripa(&["run", "--config", &cfg, "--out", out_a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(ripa(&["run", "--config", &cfg, "--out", out_b.to_str().unwrap()]).status.code(), Some(0));
    let csv_a = fs::read(out_a.join("flow_trajectory.csv")).unwrap();
    let csv_b = fs::read(out_b.join("flow_trajectory.csv")).unwrap();
    assert!(!csv_a.is_empty());
    assert_eq!(csv_a, csv_b, "trajectory CSV must be byte-identical across runs");
    let header = String::from_utf8_lossy(&csv_a);
    assert!(header.starts_with("t,x1,x2,v1,v2,lambda,yosida_norm\n"));
    // the JSON documents agree except for wall time
    let strip = |p: &Path| {
        let text = fs::read_to_string(p.join("flow_diagnostics.json")).unwrap();
        text.lines()
            .filter(|l| !l.contains("wall_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&out_a), strip(&out_b));
}

#[test]
fn divergent_run_reports_cleanly() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "blowup.json",
        r#"{
            "schema": 1,
            "name": "blowup",
            "mode": "second_order_raw",
            "operator": {"kind": "rotation2d"},
            "alpha": 10.0,
            "t0": 1.0,
            "t_end": 100.0,
            "x0": [10.0, 10.0],
            "v0": [0.0, 0.0]
        }"#,
    );
    let out = ripa(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "divergence is a result, not a failure");
    assert!(String::from_utf8_lossy(&out.stdout).contains("diverged"));
    let doc = fs::read_to_string(dir.path().join("blowup_diagnostics.json")).unwrap();
    assert!(doc.contains("\"diverged\": true"));
    let json: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert!(json["final_norm"].as_f64().unwrap() >= 1e20);
}

#[test]
fn table1_with_coarse_fixed_step_exits_1() {
    let dir = TempDir::new().unwrap();
    let out = ripa(&["table1", "--out", dir.path().to_str().unwrap(), "--dt", "25"]);
    assert_eq!(out.status.code(), Some(1), "a 25-unit step cannot hold the bands");
    assert!(String::from_utf8_lossy(&out.stdout).contains("VIOLATED"));
    // the table artifacts still record the violating values
    assert!(dir.path().join("table1.csv").exists());
}

#[test]
fn table1_default_passes_and_writes_both_artifacts() {
    let dir = TempDir::new().unwrap();
    let out = ripa(&["table1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert!(csv.starts_with("key,equation,final_distance,reference,within_band\n"));
    assert_eq!(csv.lines().count(), 6);
    assert_eq!(csv.matches(",true").count(), 5);
    assert!(dir.path().join("table1.txt").exists());
    assert_eq!(dir_entries(dir.path()).len(), 2, "table1 writes exactly two artifacts");
}

#[test]
fn sweep_empty_axis_yields_header_only_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.json",
        &format!(
            r#"{{"schema": 1, "base": {SMALL_FLOW}, "grid": {{"alpha": []}}}}"#
        ),
    );
    let out = ripa(&["sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(
        csv,
        "alpha,epsilon,p,q,compliant,final_distance,sup_scaled_speed,final_residual,diverged,error\n"
    );
}

#[test]
fn sweep_rows_follow_grid_order_and_carry_compliance() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.json",
        r#"{
            "schema": 1,
            "base": {
                "schema": 1,
                "name": "cell",
                "mode": "ripa",
                "operator": {"kind": "rotation2d"},
                "alpha": 10.0,
                "epsilon": 1.25,
                "s": 1.0,
                "max_iters": 500,
                "x0": [10.0, 10.0]
            },
            "grid": {"epsilon": [0.1, 1.25]}
        }"#,
    );
    let out = ripa(&["sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    // deterministic order: epsilon axis as written; alpha echoes the base value
    assert!(rows[0].starts_with("1.0000000000000000e1,1.0000000000000001e-1,,,false,"));
    assert!(rows[1].starts_with("1.0000000000000000e1,1.2500000000000000e0,,,true,"));
    for row in rows {
        assert!(row.ends_with(','), "no error entry expected: {row}");
        assert!(row.contains(",false,") || row.contains(",true,"));
    }
}

#[test]
fn sweep_oversized_grid_exits_2() {
    let dir = TempDir::new().unwrap();
    let axis: Vec<String> = (0..25).map(|i| format!("{i}.0")).collect();
    let axis = axis.join(", ");
    let cfg = write_config(
        dir.path(),
        "sweep.json",
        &format!(
            r#"{{"schema": 1, "base": {SMALL_FLOW},
                "grid": {{"alpha": [{axis}], "epsilon": [{axis}], "p": [{axis}]}}}}"#
        ),
    );
    let out = ripa(&["sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("15625 cells"));
}

#[test]
fn spectra_reference_point_digits() {
    let dir = TempDir::new().unwrap();
    let out = ripa(&[
        "spectra",
        "--out",
        dir.path().to_str().unwrap(),
        "--t0",
        "10",
        "--t-end",
        "100",
        "--points",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("spectra.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,lambda,re_theta_plus,im_theta_plus,re_theta_minus,im_theta_minus"
    );
    let fields: Vec<f64> =
        lines.next().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    // default quadratic schedule with alpha = 10, epsilon = 1.25 at t = 10
    assert_eq!(fields[0], 10.0);
    assert_eq!(fields[1], 2.25);
    assert!((fields[2] - 0.7043471819695426).abs() <= 1e-10);
    assert!((fields[3] - -0.4035985522737291).abs() <= 1e-10);
    assert!((fields[4] - 0.2956528180304574).abs() <= 1e-10);
    assert!((fields[5] - 0.4035985522737292).abs() <= 1e-10);
    // endpoints land exactly
    assert!(lines.next().unwrap().starts_with("1.0000000000000000e2,"));
}

#[test]
fn audit_small_run_succeeds_and_records_seed() {
    let dir = TempDir::new().unwrap();
    let out = ripa(&[
        "audit",
        "--out",
        dir.path().to_str().unwrap(),
        "--samples",
        "500",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS rotation-2d"));
    assert!(!stdout.contains("FAIL"));
    let csv = fs::read_to_string(dir.path().join("audit.csv")).unwrap();
    assert!(csv.starts_with("operator,property,samples,seed,worst,tolerance,passed\n"));
    for row in csv.lines().skip(1) {
        assert!(row.contains(",500,7,"), "sample count and seed echoed per row: {row}");
        assert!(row.ends_with(",true"));
    }
}

#[test]
fn run_overrides_conflict_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "flow.json", SMALL_FLOW);
    // clap rejects --dt together with --rtol before the config is read
    let out = ripa(&["run", "--config", &cfg, "--dt", "0.1", "--rtol", "1e-6"]);
    assert_eq!(out.status.code(), Some(2));
    // --iters has no meaning on a flow: config error from the scenario layer
    let out = ripa(&["run", "--config", &cfg, "--iters", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("iters"));
}
