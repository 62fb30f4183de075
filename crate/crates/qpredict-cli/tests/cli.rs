//! End-to-end checks of the binary: exit-code contract, config handling, and
//! output formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qpredict"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("qpredict-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_cfg(name: &str, body: &str) -> PathBuf {
    let path = tmp(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn success_paths_exit_zero() {
    let cfg = write_cfg("ok.cfg", "n = 8\np = 4\ntrials = 2\ntimes = 1, 9\n");
    for sub in ["wizard", "predict", "restore", "shor", "sweep"] {
        let out = bin()
            .args([sub, "--config", cfg.to_str().unwrap(), "--seed", "1"])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{sub}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn missing_config_file_exits_two() {
    let out = bin()
        .args(["predict", "--config", "/nonexistent/q.cfg"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_config_exits_two() {
    let cfg = write_cfg("bad.cfg", "n = eight\n");
    let out = bin()
        .args(["predict", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn p_larger_than_n_exits_two() {
    let cfg = write_cfg("pn.cfg", "n = 4\np = 6\n");
    let out = bin()
        .args(["wizard", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn empty_time_list_exits_two() {
    let cfg = write_cfg("empty.cfg", "n = 8\np = 4\ntimes =\n");
    let out = bin()
        .args(["predict", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn horizon_violation_exits_two_with_error_row() {
    let cfg = write_cfg("hor.cfg", "n = 8\np = 4\ntrials = 1\ntimes = 1, 1000\n");
    let out = bin()
        .args(["predict", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error=horizon t=1000"), "{err}");
}

#[test]
fn capacity_guard_exits_three() {
    let cfg = write_cfg("cap.cfg", "n = 15\np = 5\n");
    let out = bin()
        .args(["wizard", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);

    let cfg = write_cfg("cap2.cfg", "n = 12\np = 5\ntrials = 1\n");
    let out = bin()
        .args(["predict", "--config", cfg.to_str().unwrap(), "--max-qubits", "16"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn raised_capacity_guard_warns() {
    let cfg = write_cfg("warn.cfg", "n = 8\np = 4\ntrials = 1\ntimes = 1\n");
    let out = bin()
        .args(["predict", "--config", cfg.to_str().unwrap(), "--max-qubits", "26"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn bound_violation_exits_one() {
    // a negative tolerance tightens the distance bound below what any real
    // run achieves, forcing the bound-violation path
    let cfg = write_cfg("tight.cfg", "n = 8\np = 4\ntrials = 1\ntimes = 9\n");
    let out = bin()
        .args(["predict", "--config", cfg.to_str().unwrap(), "--tolerance=-0.5"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn shor_with_shared_factor_exits_two() {
    let out = bin()
        .args(["shor", "--modulus", "15", "--base", "5"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn csv_header_is_stable() {
    let cfg = write_cfg("head.cfg", "n = 8\np = 4\ntrials = 1\ntimes = 1\n");
    let out = bin()
        .args(["predict", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text
        .lines()
        .find(|l| l.starts_with("experiment,"))
        .expect("header row present");
    assert_eq!(
        header,
        "experiment,n,p,q,delta,t,distance,fidelity,anc_zero_prob,u_cond,naive_cost,speedup"
    );
}

#[test]
fn json_round_trips_csv_values() {
    let cfg = write_cfg("fmt.cfg", "n = 8\np = 4\ntrials = 1\ntimes = 1, 9\n");
    let csv_path = tmp("fmt.csv");
    let json_path = tmp("fmt.json");
    for (fmt, path) in [("csv", &csv_path), ("json", &json_path)] {
        let out = bin()
            .args([
                "predict",
                "--config",
                cfg.to_str().unwrap(),
                "--seed",
                "3",
                "--format",
                fmt,
                "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let rows = json.as_array().unwrap();
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let csv_rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), csv_rows.len());
    for (j, c) in rows.iter().zip(&csv_rows) {
        let fields: Vec<&str> = c.split(',').collect();
        assert_eq!(j["t"].to_string(), fields[5]);
        assert_eq!(j["distance"].to_string(), fields[6]);
        assert_eq!(j["u_cond"].to_string(), fields[9]);
    }
}

#[test]
fn invalid_format_exits_two() {
    let out = bin().args(["wizard", "--format", "xml"]).output().unwrap();
    assert_eq!(code(&out), 2);
}
