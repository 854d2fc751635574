use std::path::Path;
use std::process::Command;

fn crfve() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crfve"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL: &str = r#"{
  "mesh": { "n": 8 },
  "partition": { "m": 2 },
  "coefficient": { "grid": 8, "inclusions": [{ "x": [1, 3], "y": [1, 3] }], "alpha1": [1, 100] }
}"#;

#[test]
fn iterations_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("it.csv");
    let status = crfve().args(["iterations", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha1,iterations,cp,converged,direct_rel_error");
    assert_eq!(lines.len(), 3);
    assert!(lines[1..].iter().all(|l| l.contains(",true,")));
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL.replace("\"partition\"", "\"solver\": { \"maxit\": 2 },\n  \"partition\"");
    let cfg = write_config(dir.path(), &body);
    let out = dir.path().join("it.csv");
    let status = crfve().args(["iterations", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(out.exists());
}

#[test]
fn mesh_info_and_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = crfve().args(["mesh-info", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("dofs,176"));

    let stem = dir.path().join("spec.csv");
    let status = crfve().args(["spectrum", "--config"]).arg(&cfg).arg("--out").arg(&stem).status().unwrap();
    assert!(status.success());
    for suffix in ["spec_fve.csv", "spec_precond.csv"] {
        let text = std::fs::read_to_string(dir.path().join(suffix)).unwrap();
        assert_eq!(text.lines().count(), 177);
    }
}

#[test]
fn diagnostics_convergence_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{ "coefficient": { "frequency": 1 }, "sweep": { "n": [4, 8], "m": [2] } }"#);
    for (cmd, header) in [
        ("diagnostics", "h,fe_fve_diff_norm"),
        ("convergence", "h,error,order"),
        ("scaling", "h,H,iterations,cp,converged"),
    ] {
        let out = crfve().arg(cmd).arg("--config").arg(&cfg).output().unwrap();
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next(), Some(header), "{cmd}");
        assert_eq!(text.lines().count(), 3, "{cmd}");
    }
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{ "mesh": { "cells": 8 } }"#);
    let out = crfve().args(["mesh-info", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
