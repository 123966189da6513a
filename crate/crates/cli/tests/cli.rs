use std::path::Path;
use std::process::{Command, Output};

fn roughlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roughlap")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constants_csv() {
    let o = roughlap(&["constants", "--n", "2", "--lambda-grid", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,lambda,omega_n,a_n,c_lambda,lambda_c,residual"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 2.0);
    assert!((row[5] - 1.121059373416006).abs() < 1e-10);
    assert_eq!(text.lines().count(), 2);

    let o = roughlap(&["constants", "--n", "2,3", "--lambda-grid", "0.01:10:5"]);
    assert_eq!(stdout(&o).lines().count(), 11);
}

#[test]
fn bound_json() {
    let o = roughlap(&["bound", "--dim", "4", "--diameter", "1", "--p", "4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.0919698602928606).abs() < 1e-12);
    let o = roughlap(&["bound", "--dim", "3", "--diameter", "1", "--p", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn small_spectrum() {
    let o = roughlap(&["spectrum", "--manifold", "sphere", "--subdiv", "2", "--k", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("index,eigenvalue,residual\n"));
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 3);
    assert!(values.iter().all(|v| (v - 1.0).abs() < 0.05));

    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("l.mtx");
    let o = roughlap(&["spectrum", "--manifold", "torus", "--subdiv", "1", "--k", "2", "--export-matrix", mtx.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&mtx).unwrap().starts_with("%%MatrixMarket"));
}

fn write_spec(dir: &Path, checks: &str) -> String {
    let path = dir.join("spec.json");
    let text = format!(
        r#"{{"name": "small", "manifold": {{"kind": "ico_sphere", "radius": 1.0, "subdivisions": 2}}, "checks": [{checks}]}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn verify_and_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"check": "lemma_l6_grid", "t": [1.0], "gamma": [2.0]}, {"check": "prop_p3"}"#);
    let out = dir.path().join("out");
    let o = roughlap(&["verify", "--spec", &spec, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1 passed, 0 failed, 1 reported"));
    for f in ["report.json", "outcomes.csv", "quantities.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report = out.join("report.json");
    let md = roughlap(&["report", report.to_str().unwrap()]);
    assert_eq!(stdout(&md), stdout(&o));
    let csv = roughlap(&["report", report.to_str().unwrap(), "--format", "outcomes"]);
    assert!(stdout(&csv).starts_with("name,status,tolerance,measured,bounds,notes\n"));
    let q = roughlap(&["report", report.to_str().unwrap(), "--format", "quantities"]);
    assert_eq!(stdout(&q), std::fs::read_to_string(out.join("quantities.csv")).unwrap());
}

#[test]
fn failing_spec_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        r#"{"check": "prop_p5_implication", "lambda1": 1.0, "diameter": 4.0, "kappa": 0.0, "c": 1.0, "dim": 2, "has_nonparallel_harmonic": true}"#,
    );
    let o = roughlap(&["verify", "--spec", &spec, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"check": "lemma_l9"}"#);
    let o = roughlap(&["verify", "--spec", &spec, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("spec.json:1:"));
    let o = roughlap(&["report", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
