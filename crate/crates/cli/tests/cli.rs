use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hesse-ulrich"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("hesse-ulrich-{}-{name}", std::process::id()))
}

fn dims(m: &Value) -> (u64, u64) {
    (m["rows"].as_u64().unwrap(), m["cols"].as_u64().unwrap())
}

const SWEEP: &[&str] = &[
    "sweep",
    "--tau",
    "i,0.3+1.1i,-0.1+0.9i",
    "--a",
    "0.3,0.2+0.05i,0.41+0.1i,0.17+0.3i,0.25-0.1i",
    "--k",
    "0..3",
];

#[test]
fn emit_json_k1() {
    let out = run(&["emit", "--tau", "i", "--a", "0.3", "--k", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(dims(&v["A_analytic"]), (6, 6));
    assert_eq!(dims(&v["B_analytic"]), (6, 6));
    assert_eq!(dims(&v["A_algebraic"]), (6, 6));
    assert_eq!(dims(&v["M"]), (3, 3));
    assert_eq!(v["lambdas"].as_array().unwrap().len(), 1);
}

#[test]
fn emit_k0_has_only_rank_one_matrices() {
    let out = run(&["emit", "--k", "0"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(dims(&v["M"]), (3, 3));
    assert_eq!(dims(&v["L"]), (3, 3));
    assert!(v.get("A_analytic").is_none());
    assert!(v.get("A_algebraic").is_none());
}

#[test]
fn emit_projective_point() {
    let first = run(&["emit", "--k", "0"]);
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    let coords: Vec<String> = v["point"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| format!("{}{:+}i", c[0].as_f64().unwrap(), c[1].as_f64().unwrap()))
        .collect();
    let out = run(&["emit", "--a", &coords.join(":"), "--k", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("A_analytic").is_none());
    assert_eq!(dims(&v["A_algebraic"]), (9, 9));
    assert_eq!(v["lambdas"][0], serde_json::json!([1.0, 0.0]));
}

#[test]
fn emit_latex() {
    let out = run(&["emit", "--k", "2", "--format", "latex", "--digits", "3"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("\\begin{bmatrix}"));
    assert!(s.contains("\\binom{2}{1}"));
    assert!(s.contains("M_{-2a,x}"));
}

#[test]
fn emit_to_file() {
    let path = scratch("emit.json");
    let out = run(&["emit", "--k", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(dims(&v["A_analytic"]), (6, 6));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn torsion_point_is_refused() {
    let out = run(&["emit", "--a", "0.3333333333333333"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("point in E[3]"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["emit", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--tau", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--mutate", "flip"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--k", "x..y"]).status.code(), Some(2));
}

#[test]
fn default_check_passes() {
    let out = run(&["check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let checks = lines(&out);
    assert!(checks.iter().all(|c| c["pass"] == Value::Bool(true)));
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    for expected in [
        "theta.hesse_identity",
        "rank_one.ml_minus_w",
        "factorization.ab_minus_w",
        "presentation.analytic.det_vs_w_power",
        "presentation.algebraic.corank_on_curve",
        "automorphy.cocycle",
        "kernel.stacked_sections",
        "calibration.offset_scalars",
        "elimination.c_independent_of_a",
    ] {
        assert!(names.contains(&expected), "missing {expected}");
    }
}

#[test]
fn mutations_fail() {
    for m in ["zero-block", "drop-binomial", "perturb-psi"] {
        let out = run(&["check", "--k", "2", "--mutate", m]);
        assert_eq!(out.status.code(), Some(1), "mutation {m}");
        assert!(lines(&out).iter().any(|c| c["pass"] == Value::Bool(false)));
    }
}

#[test]
fn unreachable_tolerance_fails() {
    let out = run(&["check", "--k", "1", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_is_deterministic() {
    let first = run(SWEEP);
    let second = run(SWEEP);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stdout));
    assert_eq!(first.stdout, second.stdout);
    let checks = lines(&first);
    let factorization = checks.iter().find(|c| c["name"] == "factorization.ab_minus_w").unwrap();
    assert_eq!(factorization["inputs"]["configs"], 60);
    assert!(checks.iter().all(|c| c["pass"] == Value::Bool(true)));
}

#[test]
fn negative_values_parse() {
    let out = run(&["check", "--k", "0", "--tau", "-0.1+0.9i", "--a", "-0.3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn empty_sweep_range() {
    let out = run(&["sweep", "--k", "3..1"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}
