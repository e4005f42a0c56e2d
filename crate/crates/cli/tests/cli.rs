use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ricci-dynamo"));
    c.env_remove("RICCI_DYNAMO_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let idx = rows[0]
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn tube_reports_minus_ten_at_theta_zero() {
    let o = run(&[
        "tube",
        "--kappa0",
        "1",
        "--r0",
        "0.1",
        "--sweep",
        "theta=0:3.141592653589793:5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    let theta = column(&rows, "theta");
    let kg = column(&rows, "K_G");
    assert_eq!(theta[0], 0.0);
    assert_eq!(kg[0], -10.0);
    assert_eq!(kg.len(), 5);
}

#[test]
fn cl_spectrum_ideal_row() {
    let o = run(&["cl-spectrum", "--eps", "0", "--kappa", "4"]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows[0], ["eps", "kappa", "re_lambda", "im_lambda"]);
    let vals: Vec<f64> = rows[1].iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(vals, [0.0, 4.0, 0.0, 2.0]);
}

#[test]
fn json_output_has_metadata_and_rows() {
    let o = run(&[
        "dynamo",
        "--format",
        "json",
        "--vr",
        "-0.1",
        "--r",
        "1",
        "--omega1",
        "1",
        "--theta",
        "0.7853981633974483",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metadata"]["command"], "dynamo");
    assert!(v["metadata"]["flags"].as_array().unwrap().len() >= 3);
    let margin = v["rows"][0]["margin"].as_f64().unwrap();
    assert!((margin - 0.9).abs() < 1e-12);
}

#[test]
#[allow(clippy::approx_constant)]
fn config_file_is_read_and_flags_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "theta = 0.1\nvr = -0.1\nr = 1.0\nomega1 = 1.0\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let file_only = data_rows(&stdout(&run(&["lyapunov", "--config", cfg])));
    assert_eq!(column(&file_only, "theta"), [0.1]);
    let flagged = data_rows(&stdout(&run(&[
        "lyapunov", "--config", cfg, "--theta", "0.785398",
    ])));
    assert_eq!(column(&flagged, "theta"), [0.785398]);
    assert_eq!(column(&flagged, "lambda2"), [-0.2]);
}

#[test]
fn config_echo_is_embedded() {
    let o = run(&["tube", "--r0", "0.05"]);
    let text = stdout(&o);
    let echo = text.lines().find(|l| l.starts_with("# config: ")).unwrap();
    let v: serde_json::Value = serde_json::from_str(echo.trim_start_matches("# config: ")).unwrap();
    assert_eq!(v["r0"], 0.05);
    assert!(text
        .lines()
        .any(|l| l.starts_with("# flags: ") && l.contains("closed_form_r1212_lacks_r0_factor")));
}

#[test]
fn unknown_config_key_exits_one_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "r0 = 0.1\nkappa_zero = 2.0\n").unwrap();
    let o = run(&["tube", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa_zero"));
}

#[test]
fn zero_count_sweep_exits_one() {
    let o = run(&["tube", "--sweep", "theta=0:1:0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_flag_exits_one_and_help_exits_zero() {
    assert_eq!(run(&["tube", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["tube", "--r0", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_two() {
    // Polar chart with the point inside the curvature stencil's reach of r = 0.
    let o = run(&["curvature", "--metric", "polar", "--r", "1e-5"]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["cl-spectrum", "--format", "json"])
        .env("RICCI_DYNAMO_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(Path::new(&dir.path().join("cl-spectrum.json")).exists());
}

#[test]
fn ricci_flow_trajectory_rows() {
    let o = run(&[
        "ricci-flow",
        "--theta",
        "1.0",
        "--t-end",
        "0.01",
        "--dt",
        "0.001",
    ]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    assert_eq!(
        rows[0],
        ["t", "g11", "g22", "g33", "lambda1", "lambda2", "lambda3"]
    );
    assert_eq!(rows.len(), 12);
    let g11 = column(&rows, "g11");
    assert!((g11.last().unwrap() - 0.98).abs() < 1e-8);
}

#[test]
fn curvature_of_unit_sphere() {
    let o = run(&["curvature", "--metric", "sphere", "--theta", "1.0"]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    assert!((column(&rows, "k12")[0] - 1.0).abs() < 1e-6);
    assert!((column(&rows, "scalar")[0] - 2.0).abs() < 1e-6);
}

#[test]
fn sweep_grid_is_cartesian_in_order() {
    let o = run(&[
        "cl-spectrum",
        "--sweep",
        "eps=0:1:3",
        "--sweep",
        "kappa=-1:1:2",
    ]);
    let rows = data_rows(&stdout(&o));
    let eps = column(&rows, "eps");
    let kappa = column(&rows, "kappa");
    assert_eq!(eps, [0.0, 0.0, 0.5, 0.5, 1.0, 1.0]);
    assert_eq!(kappa, [-1.0, 1.0, -1.0, 1.0, -1.0, 1.0]);
}
