use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn seccf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seccf")).args(args).output().expect("spawn seccf")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", stderr(out));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn rates_reports_both_crossings_deterministically() {
    let args = ["rates", "--h-min", "2", "--h-max", "3", "--h-step", "0.001"];
    let a = seccf(&args);
    let b = seccf(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let err = stderr(&a);
    let zeros: Vec<f64> = err
        .lines()
        .filter_map(|l| l.split("h = ").nth(1)?.split(';').next()?.parse().ok())
        .collect();
    assert_eq!(zeros.len(), 2, "{err}");
    assert!((zeros[0] - 2.442506).abs() < 1e-6, "{err}");
    assert!((zeros[1] - 2.517238).abs() < 1e-6, "{err}");
    let text = stdout(&a);
    assert!(text.starts_with("h,rate_h13_nats,rate_h17_nats,i_h_nats\n"), "{text}");
    assert_eq!(text.lines().count(), 1002);
}

#[test]
fn rates_single_point_at_zero_gain() {
    let out = seccf(&["rates", "--h-min", "0", "--h-max", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row.len(), 4);
    assert!(row[1].abs() < 1e-9);
    assert!((row[2] + std::f64::consts::LN_2).abs() < 1e-9);
    assert!(row[3].abs() < 1e-9);
}

#[test]
fn rates_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rates.csv");
    let out = seccf(&["rates", "--h-min", "1", "--h-max", "1.1", "--h-step", "0.05", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(path).unwrap().lines().count(), 4);
}

#[test]
fn bound_for_repetition_code() {
    let v = json(&seccf(&["bound", "--n", "3", "--k", "1", "--h", "1", "--code", "repetition:3"]));
    let report = &v["report"];
    assert_eq!(report["A_used"].as_f64(), Some(4.0));
    assert!(report["b1"].as_f64().unwrap() <= 3.0 + 1e-12);
    assert!(v["run"]["bound"].is_object());
}

#[test]
fn bound_without_signal_is_trivial() {
    let v = json(&seccf(&["bound", "--n", "20", "--k", "5", "--kbar", "2", "--h", "0"]));
    assert_eq!(v["report"]["b1"].as_f64(), Some(3.0));
}

#[test]
fn code_summary_of_hamming() {
    let v = json(&seccf(&["code", "hamming"]));
    let text = v.to_string();
    assert!(text.contains("\"n\":7"), "{text}");
    assert!(text.contains("\"k\":4"), "{text}");
}

#[test]
fn simulate_noiseless_limit_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.cfg", "code = uniform:12:4:1\nkbar = 1\nh = 20\nn0 = 0.01\nshifts = random\n");
    let jsonl = dir.path().join("rounds.jsonl");
    let args = ["simulate", "--config", &cfg, "--trials", "300", "--seed", "11"];
    let a = json(&seccf(&args));
    assert_eq!(a["result"]["p_sum_err"].as_f64(), Some(0.0));
    assert_eq!(a["result"]["p_recovery_err"].as_f64(), Some(0.0));
    assert_eq!(seccf(&args).stdout, seccf(&args).stdout);

    let with_rounds = seccf(&["simulate", "--config", &cfg, "--trials", "5", "--jsonl", jsonl.to_str().unwrap()]);
    assert!(with_rounds.status.success());
    let lines: Vec<Value> = fs::read_to_string(&jsonl)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    for round in &lines {
        assert_eq!(round["recovered_m2_at_node1"], round["m2"]);
        assert_eq!(round["recovered_m1_at_node2"], round["m1"]);
        assert_eq!(round["y"].as_array().unwrap().len(), 12);
    }
}

#[test]
fn invalid_config_lists_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "code = repetition:3\nkbar = 4\nn0 = -1\ndecoder = fancy\n");
    let out = seccf(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    for needle in ["kbar", "channel", "decoder"] {
        assert!(err.contains(needle), "{err}");
    }
}

#[test]
fn leakage_shift_averaged_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "leak.cfg", "code = repetition:2\nh = 1\n");
    let v = json(&seccf(&["leakage", "--config", &cfg, "--method", "shift-averaged"]));
    let value = v["leakage"]["value"].as_f64().unwrap();
    assert!((value - 0.670_180_95).abs() < 1e-6, "{value}");
}

#[test]
fn verify_small_grid_passes_and_faults_fail() {
    let ok = seccf(&["verify", "--grid", "small"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("all checks passed"));
    let bad = seccf(&["verify", "--grid", "small", "--inject-fault", "squared"]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn run_config_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let out = seccf(&["--run-config", path.to_str().unwrap(), "rates", "--h-min", "0", "--h-max", "0"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert!(v["tool_version"].is_string());
    assert!(v["rates"].is_object(), "{v}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(seccf(&["bound", "--h", "1"]).status.code(), Some(2));
    assert_eq!(seccf(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(seccf(&["leakage", "--config", "/nonexistent.cfg"]).status.code(), Some(2));
}
