use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthospace"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn spec(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const L1_3: &str = r#"{"dim":3,"cone":{"kind":"nonneg"},"norm":{"kind":"lp","p":1},"p_class":1}"#;
const SUP8: &str = r#"{"dim":8,"cone":{"kind":"nonneg"},"norm":{"kind":"sup"},"p_class":"inf"}"#;

#[test]
fn ortho_reports_witness() {
    let dir = TempDir::new().unwrap();
    let l1 = spec(&dir, "l1_3.json", L1_3);
    let out = run(&["ortho", "--space", l1.to_str().unwrap(), "--x", "1,1,0", "--y", "0,1,1", "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "not_orthogonal");
    assert_eq!(v["witness_k"], -1.0);
}

#[test]
fn example_suite_passes() {
    let out = run(&["verify", "ex46_nonuniqueness", "--n", "2049"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v[0]["passes"], 1);
    assert!((v[0]["metrics"]["max_gap"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
}

#[test]
fn example_command_writes_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ex.json");
    let out = run(&["example46", "--n", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!((v["example"]["g1"][1].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_all_on_sup8() {
    let dir = TempDir::new().unwrap();
    let sup8 = spec(&dir, "sup8.json", SUP8);
    let report = dir.path().join("report.json");
    let out = run(&["verify", "all", "--space", sup8.to_str().unwrap(), "--samples", "500", "--seed", "7", "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 22);
    for r in reports {
        assert_eq!(r["counterexamples"].as_array().unwrap().len(), 0);
        assert_eq!(r["seed"], 7);
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let sup8 = spec(&dir, "sup8.json", SUP8);
    let strip = |mut v: Value| {
        for r in v.as_array_mut().unwrap() {
            r["elapsed_ms"] = Value::Null;
        }
        v
    };
    let args = ["verify", "thm33_equivalence", "--space", sup8.to_str().unwrap(), "--samples", "50", "--seed", "3"];
    let a = strip(stdout_json(&run(&args)));
    let b = strip(stdout_json(&run(&args)));
    assert_eq!(a, b);
}

#[test]
fn explicitly_requested_unsupported_suite_fails() {
    let dir = TempDir::new().unwrap();
    let l1 = spec(&dir, "l1_3.json", L1_3);
    let out = run(&["verify", "cor38_order_unit", "--space", l1.to_str().unwrap(), "--samples", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)[0]["status"]["state"], "unsupported");
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad_p = spec(&dir, "bad_p.json", r#"{"dim":2,"cone":{"kind":"nonneg"},"norm":{"kind":"lp","p":0.5},"p_class":2.0}"#);
    let improper = spec(&dir, "improper.json", r#"{"dim":2,"cone":{"kind":"rays","generators":[[1,0],[-1,0]]},"norm":{"kind":"sup"},"p_class":"inf"}"#);
    for (path, msg) in [(&bad_p, "invalid exponent"), (&improper, "cone not proper")] {
        let out = run(&["support", "--space", path.to_str().unwrap(), "--v", "1,0"]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains(msg));
    }
    let out = run(&["verify", "thm99_nothing"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
    assert_eq!(run(&["verify", "all", "--bogus"]).status.code(), Some(2));
    let l1 = spec(&dir, "l1_3.json", L1_3);
    let out = run(&["ortho", "--space", l1.to_str().unwrap(), "--x", "1, 2,0", "--y", "0,1,1", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn one_off_queries() {
    let dir = TempDir::new().unwrap();
    let sup8 = spec(&dir, "sup8.json", SUP8);
    let s = sup8.to_str().unwrap();
    let d = stdout_json(&run(&["decompose", "--space", s, "--v", "3,-2,0,0,0,0,0,1", "--p", "inf"]));
    assert_eq!(d["norm_aggregate"], 3.0);
    assert_eq!(d["u2"][1], 2.0);
    let f = stdout_json(&run(&["support", "--space", s, "--v", "0,2,1,0,0,0,0,0", "--positive"]));
    assert_eq!(f["attained_value"], 2.0);
    let c = stdout_json(&run(&["crust", "--space", s, "--u", "1,1,1,1,1,1,1,0.5"]));
    assert!(c["crust"].is_null());
    let c = stdout_json(&run(&["crust", "--space", s, "--u", "1,0,0,0,0,0,0,0"]));
    assert_eq!(c["crust"]["partner_verified"], true);
}
