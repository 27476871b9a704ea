use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const WORKED: &str = r#"{
  "profile": {"mode": "irreducible", "phi": {"polynomial": [0.5, 0.25]}, "c_bar": -1.0,
              "a": 1.0, "base_curvature": 2.0, "tau_min": -0.5},
  "numerics": {"tau_samples": 9, "t_samples": 9, "oracle_points": 3}
}"#;

const REDUCIBLE: &str = r#"{
  "profile": {"mode": "reducible", "q": {"polynomial": [1.0, 0.7, -0.2, 0.1]}, "a": 0.5, "tau_min": -0.9},
  "topology": {"signature": 1}
}"#;

fn equichar(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_equichar"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("EQUICHAR_THREADS", t),
        None => cmd.env_remove("EQUICHAR_THREADS"),
    };
    cmd.output().expect("spawn equichar")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn eta_outputs_are_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "worked.json", WORKED);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(code(&equichar(&["eta", &cfg, "-o", a.to_str().unwrap()], None)), 0);
    assert_eq!(code(&equichar(&["eta", &cfg, "-o", b.to_str().unwrap()], Some("1"))), 0);
    for name in ["lform.csv", "transgression.csv", "report.json"] {
        let x = fs::read(a.join(name)).unwrap();
        let y = fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
        assert!(!x.contains(&b'\r'));
    }
}

#[test]
fn table_headers_and_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "worked.json", WORKED);
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&equichar(&["lform", &cfg, "-o", out], None)), 0);
    assert_eq!(code(&equichar(&["transgression", &cfg, "-o", out], None)), 0);
    let l = fs::read_to_string(tmp.path().join("lform.csv")).unwrap();
    assert_eq!(l.lines().next(), Some("tau,alpha,beta,gamma,delta,L4"));
    assert_eq!(l.lines().count(), 10);
    let t = fs::read_to_string(tmp.path().join("transgression.csv")).unwrap();
    assert_eq!(t.lines().next(), Some("t,integrand_e123"));
    // Every number carries 17 significant digits.
    for field in t.lines().skip(1).flat_map(|r| r.split(',')) {
        let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
    }
}

#[test]
fn report_json_has_stable_key_order() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "worked.json", WORKED);
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&equichar(&["eta", &cfg, "-o", out], None)), 0);
    let s = fs::read_to_string(tmp.path().join("report.json")).unwrap();
    let keys = ["\n  \"config\"", "\n  \"lform\"", "\n  \"bulk\"", "\n  \"boundary\"", "\n  \"signature\"", "\n  \"eta\""];
    let pos: Vec<usize> = keys.iter().map(|k| s.find(k).expect(k)).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert!(v["eta"]["value"].as_f64().unwrap().is_finite());
    assert!(v["eta"]["error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn reducible_profile_vanishes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "red.json", REDUCIBLE);
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&equichar(&["eta", &cfg, "-o", out], None)), 0);
    let l = fs::read_to_string(tmp.path().join("lform.csv")).unwrap();
    for row in l.lines().skip(1) {
        let l4: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(l4.abs() < 1e-12, "{row}");
    }
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(v["eta"]["value"].as_f64().unwrap(), -1.0);
    assert_eq!(code(&equichar(&["check", &cfg], None)), 0);
}

#[test]
fn check_and_oracle_pass_on_worked_profile() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "worked.json", WORKED);
    let o = equichar(&["check", &cfg, "-o", tmp.path().to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(tmp.path().join("check.json").exists());
    let o = equichar(&["oracle", &cfg], None);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS oracle_curvature"));
}

#[test]
fn config_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_q0 = write_config(
        tmp.path(),
        "bad.json",
        r#"{"profile": {"mode": "reducible", "q": {"polynomial": [-1.0, 1.0]}, "tau_min": -0.5}}"#,
    );
    assert_eq!(code(&equichar(&["check", &bad_q0], None)), 2);
    let garbage = write_config(tmp.path(), "garbage.json", "{ not json");
    assert_eq!(code(&equichar(&["eta", &garbage], None)), 2);
    let missing = tmp.path().join("missing.json");
    assert_eq!(code(&equichar(&["lform", missing.to_str().unwrap()], None)), 2);
    let good = write_config(tmp.path(), "worked.json", WORKED);
    assert_eq!(code(&equichar(&["check", &good], Some("zero"))), 2);
}

#[test]
fn numerical_failure_exits_with_1() {
    // |φ| beyond the convergence radius of the L germ.
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "wild.json",
        r#"{"profile": {"mode": "irreducible", "phi": {"polynomial": [9.0]}, "c_bar": -1.0, "tau_min": -0.5}}"#,
    );
    let o = equichar(&["eta", &cfg, "-o", tmp.path().to_str().unwrap()], None);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
}
