use std::process::Command;

use hausdorff_mixed::bank::{bank_to_toml, default_bank, load_bank};
use hausdorff_mixed::theorems::{Q, TheoremId};

fn verify() -> Command {
    Command::new(env!("CARGO_BIN_EXE_verify"))
}

#[test]
fn run_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (json, csv) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    let out = verify()
        .args(["run", "--theorems", "1.1,1.5", "--no-err-est", "--out"])
        .arg(&json)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theorem,case,lhs,constant,rhs,ratio,pass,err_est"));
    assert_eq!(lines.count(), default_bank(TheoremId::T1_1).len() + default_bank(TheoremId::T1_5).len());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["suite"]["errors"], 0);
}

#[test]
fn failing_constant_exits_one() {
    let out = verify().args(["run", "--theorems", "4.2", "--no-err-est"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("anomaly"));
}

#[test]
fn bad_config_exits_three() {
    let out = verify().args(["run", "--theorems", "9.9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = verify().args(["run", "--bank", "/nonexistent/bank.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_exponents_fail_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut cases = default_bank(TheoremId::T3_1a);
    cases[1].exponents.set("gamma", Q::int(7));
    let bank = dir.path().join("bank.toml");
    std::fs::write(&bank, bank_to_toml(&cases).unwrap()).unwrap();
    let csv = dir.path().join("r.csv");
    let out = verify()
        .args(["run", "--theorems", "3.1a", "--bank"])
        .arg(&bank)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!csv.exists());
}

#[test]
fn bank_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bank.toml");
    let out = verify().args(["bank", "--theorems", "5.2,6.1a", "--out"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    let cases = load_bank(&path).unwrap();
    assert_eq!(cases.len(), default_bank(TheoremId::T5_2).len() + default_bank(TheoremId::T6_1a).len());
    let out = verify()
        .args(["run", "--theorems", "5.2", "--no-err-est", "--bank"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn oracle_and_sharpness_commands() {
    let out = verify().args(["oracle", "--case", "smooth-02", "--points", "4"]).output().unwrap();
    assert!(out.status.success());
    let out = verify().args(["oracle", "--case", "smooth-77"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = verify().args(["sharpness", "--theorem", "1.1", "--budget", "10"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("best ratio"));
}
