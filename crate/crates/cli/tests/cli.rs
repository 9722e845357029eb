use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sobker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sobker")).args(args).env_remove("SOBKER_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = sobker(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn field(json: &str, key: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v[key].as_f64().unwrap_or_else(|| panic!("no numeric {key} in {json}"))
}

#[test]
fn eval_univariate_diagonal() {
    assert_eq!(ok(&["kernel", "eval", "--family", "sobolev1d", "--s", "1", "--x", "0", "--t", "0"]).trim(), "0.5");
}

#[test]
fn eval_with_oracle_reports_agreement() {
    let out = ok(&["kernel", "eval", "--family", "matern", "--d", "1", "--s", "1", "--x", "0", "--t", "0", "--oracle"]);
    let row = &csv_rows(&out)[0];
    let value: f64 = row[0].parse().unwrap();
    let diff: f64 = row[3].parse().unwrap();
    assert!((value - (PI / 2.0).sqrt()).abs() <= 1e-15);
    assert!(diff <= 1e-7);
    assert_eq!(row[5], "PASS");
}

#[test]
fn eval_accepts_negative_coordinates() {
    let out = ok(&["kernel", "eval", "--family", "gaussian", "--d", "2", "--x", "-1,0.5", "--t", "0,-0.5"]);
    let v: f64 = out.trim().parse().unwrap();
    assert!((v - (-1.0f64).exp() / (2.0 * PI)).abs() <= 1e-16);
}

#[test]
fn disagreement_exits_with_consistency_code() {
    let o = sobker(&["kernel", "eval", "--family", "sobolev1d", "--s", "2", "--x", "1", "--t", "0", "--oracle", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn invalid_parameters_exit_with_usage_code() {
    let o = sobker(&["kernel", "eval", "--family", "sobolev", "--d", "4", "--s", "2", "--x", "0,0,0,0", "--t", "0,0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("s > d/2"));
    assert_eq!(sobker(&["kernel", "eval", "--family", "nope", "--x", "0", "--t", "0"]).status.code(), Some(2));
    assert_eq!(sobker(&["kernel", "eval", "--family", "gaussian", "--d", "2", "--x", "0", "--t", "0"]).status.code(), Some(2));
}

#[test]
fn unreachable_tail_exits_with_numerical_code() {
    let o = sobker(&[
        "kernel", "eval", "--family", "sobolev1d", "--s", "1", "--x", "0", "--t", "0", "--oracle", "--truncation-radius", "3",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tail bound"));
}

#[test]
fn table_reproduces_infinite_order_curve() {
    let out = ok(&["kernel", "table", "--family", "sobolevinf", "--d", "1", "--rmax", "15", "--step", "0.1"]);
    assert_eq!(out.lines().next(), Some("r,k"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 151);
    let k0: f64 = rows[0][1].parse().unwrap();
    assert!((k0 - 2.0 / (3.0 * PI)).abs() <= 1e-15);
    let r_last: f64 = rows[150][0].parse().unwrap();
    assert!((r_last - 15.0).abs() <= 1e-12);
    // the curve changes sign on [0, 15]
    assert!(rows.iter().any(|r| r[1].starts_with('-')));
}

#[test]
fn embed_chain_table() {
    let out = ok(&["embed", "--d-range", "1:30"]);
    assert_eq!(out.lines().next(), Some("d,lower,mid,upper,cap,chain"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r[5] == "PASS"));
    let first: Vec<f64> = rows[0][1..5].iter().map(|v| v.parse().unwrap()).collect();
    for (v, expect) in first.iter().zip([0.4545, 0.4607, 0.7511, 5.4709]) {
        assert!((v - expect).abs() < 5e-5, "{v} vs {expect}");
    }
}

#[test]
fn embed_radial_default_beta() {
    let rows = csv_rows(&ok(&["embed", "radial", "--d", "4", "--s", "3"]));
    let beta: f64 = rows[0][2].parse().unwrap();
    let bound: f64 = rows[0][3].parse().unwrap();
    assert_eq!(beta, 2.0);
    assert!(bound.is_finite() && bound > 0.0);
    assert_eq!(sobker(&["embed", "radial", "--d", "4", "--s", "2"]).status.code(), Some(2));
}

#[test]
fn complexity_cap() {
    let rows = csv_rows(&ok(&["complexity", "--d", "1", "--s", "1", "--eps", "0.1"]));
    assert_eq!(rows[0][2], "50");
    assert_eq!(rows[0][3], "2994");
}

#[test]
fn wce_single_gaussian_point() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("p.csv");
    fs::write(&pts, "x1\n0\n").unwrap();
    let json = ok(&["wce", "--family", "gaussian", "--density", "gaussian", "--points", pts.to_str().unwrap(), "--mc", "100000", "--seed", "1"]);
    let expect = (6.0 * PI).powf(-0.5) - 2.0 * (4.0 * PI).powf(-0.5) + (2.0 * PI).powf(-0.5);
    assert!((field(&json, "e2") - expect).abs() <= 1e-15);
    assert_eq!(field(&json, "mc_std_err"), 0.0);
    assert!(json.contains("\"method\":\"closed_form\""));
}

fn search_run(dir: &Path, name: &str, threads: &str) -> (String, String) {
    let out = dir.join(name);
    let o = Command::new(env!("CARGO_BIN_EXE_sobker"))
        .args(["search", "--family", "matern", "--d", "2", "--s", "1.5", "--n", "8", "--trials", "4", "--mc", "5000"])
        .args(["--seed", "9", "--out", out.to_str().unwrap()])
        .env("SOBKER_THREADS", threads)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    (stdout(&o), fs::read_to_string(out).unwrap())
}

#[test]
fn search_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = search_run(dir.path(), "a.csv", "1");
    let b = search_run(dir.path(), "b.csv", "3");
    let c = search_run(dir.path(), "c.csv", "0");
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a.1.lines().count(), 9);
    assert!(a.0.contains("\"check\":\"PASS\""));
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "family = \"sobolev1d\"\ns = 1\nx = [0.0]\nt = [1.0]\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v: f64 = ok(&["kernel", "eval", "--config", c]).trim().parse().unwrap();
    assert!((v - 0.5 * (-1.0f64).exp()).abs() <= 1e-16);
    let v: f64 = ok(&["kernel", "eval", "--config", c, "--t", "0"]).trim().parse().unwrap();
    assert_eq!(v, 0.5);
    fs::write(&cfg, "flavour = 1\n").unwrap();
    assert_eq!(sobker(&["kernel", "eval", "--config", c]).status.code(), Some(2));
}

fn recover_in(dir: &Path, data: &str, probe: &str) -> Output {
    let (d, p, out) = (dir.join("data.csv"), dir.join("probe.csv"), dir.join("out"));
    fs::write(&d, data).unwrap();
    fs::write(&p, probe).unwrap();
    sobker(&[
        "recover", "--family", "sobolev1d", "--s", "1", "--data", d.to_str().unwrap(), "--probe", p.to_str().unwrap(),
        "--out-dir", out.to_str().unwrap(),
    ])
}

#[test]
fn recover_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = recover_in(dir.path(), "x1,y\n0,1\n", "x1\n0\n0.7\n-2\n");
    assert_eq!(o.status.code(), Some(0));
    let coeffs = csv_rows(&fs::read_to_string(dir.path().join("out/coefficients.csv")).unwrap());
    assert_eq!(coeffs[0][2].parse::<f64>().unwrap(), 2.0);
    let probes = csv_rows(&fs::read_to_string(dir.path().join("out/probe_values.csv")).unwrap());
    for row in probes {
        let t: f64 = row[0].parse().unwrap();
        let v: f64 = row[1].parse().unwrap();
        assert!((v - (-t.abs()).exp()).abs() <= 1e-14);
    }
    let summary = fs::read_to_string(dir.path().join("out/summary.json")).unwrap();
    assert!((field(&summary, "norm") - 2f64.sqrt()).abs() <= 1e-14);
}

#[test]
fn recover_zero_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = recover_in(dir.path(), "x1,y\n-1,0\n0.5,0\n3,0\n", "x1\n1\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "norm"), 0.0);
    let probes = csv_rows(&fs::read_to_string(dir.path().join("out/probe_values.csv")).unwrap());
    assert_eq!(probes[0][1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn recover_rejects_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let o = recover_in(dir.path(), "x1,y\n0,1\n2,1\n0,3\n", "x1\n1\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("indices 0 and 2"));
}
