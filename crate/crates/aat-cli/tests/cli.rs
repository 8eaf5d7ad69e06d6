use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn aat(args: &[&str], out: &Path) -> (Output, Option<Value>) {
    let o = Command::new(env!("CARGO_BIN_EXE_aat"))
        .args(args)
        .arg("-o")
        .arg(out)
        .output()
        .unwrap();
    let report = std::fs::read_to_string(out).ok().map(|s| serde_json::from_str(&s).unwrap());
    (o, report)
}

#[test]
fn exp_all_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (o, r) = aat(&["all", problem("exp.aat").to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0));
    let r = r.unwrap();
    assert_eq!(r["trace"]["relations"]["P_11"], "z1_1 - x1");
    assert_eq!(r["seed"], 42);
    assert!(r.get("timings").is_none());
    for key in ["spec-echo", "trace", "variety", "formulas", "residuals", "periods", "verdicts"] {
        assert!(r.get(key).is_some(), "{key}");
    }
}

#[test]
fn lemniscatic_variety() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (o, r) = aat(&["all", problem("lemniscatic.aat").to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0));
    let r = r.unwrap();
    assert_eq!(r["variety"]["V"], "theta^2 - 4*x1^3 + 4*x1");
    assert_eq!(r["variety"]["painleve"][0], "du = dx/theta");
    assert_eq!(r["formulas"]["excluded"], "x1 - y1 = 0");
}

#[test]
fn missing_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (o, r) = aat(&["derive", "missing.aat"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("file not found"));
    assert!(r.unwrap()["failures"][0].as_str().unwrap().contains("file not found"));
}

#[test]
fn degree_zero_rejected_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (o, _) = aat(&["derive", problem("degree-zero.aat").to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree 0 in L1"));
}

#[test]
fn stages_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let file = problem("case3.aat");
    let (o, r) = aat(&["derive", file.to_str().unwrap(), "--seed", "7", "--samples", "30"], &out);
    assert_eq!(o.status.code(), Some(0));
    let r = r.unwrap();
    assert_eq!(r["seed"], 7);
    assert_eq!(r["spec-echo"]["options"]["samples"], 30);
    assert!(r["variety"].as_object().unwrap().is_empty());
    let (o, r) = aat(&["period", file.to_str().unwrap(), "--timings"], &out);
    assert_eq!(o.status.code(), Some(0));
    let r = r.unwrap();
    assert_eq!(r["verdicts"]["periods"], "pass");
    assert!(r["timings"]["period"].is_number());
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("wrong.aat");
    // exp addition law paired with the rational family
    std::fs::write(&file, "[mapping]\nn = 1\nfamily = rational\n[aat]\nG1 = L1 - x1*y1\n").unwrap();
    let out = dir.path().join("r.json");
    let (o, r) = aat(&["derive", file.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(r.unwrap()["verdicts"]["G1 on backend"], "fail");
}

#[test]
fn catalog_single_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (o, r) = aat(&["catalog", "--family", "singular2-case5"], &out);
    assert_eq!(o.status.code(), Some(0));
    let r = r.unwrap();
    assert_eq!(r["trace"]["singular2-case5"]["method"], "registry");
    assert!(r["periods"]["singular2-case5"]["expected"].is_string());
}
