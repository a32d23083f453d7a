use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn stham(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stham"))
        .args(args)
        .env_remove("STHAM_DENSE_THRESHOLD")
        .env_remove("STHAM_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn gap_reports_the_leading_bound() {
    let out = stham(&["gap", "--n", "4", "--D", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["bound"].as_f64().unwrap() - PI.powi(4) / 768.0).abs() <= 1e-15);
    let gap = v["gap"].as_f64().unwrap();
    assert!(gap >= v["bound"].as_f64().unwrap());
    assert_eq!(v["seed"], 0);
    assert_eq!(v["tolerance"], 1e-12);
    assert_eq!(v["pass"], true);
}

#[test]
fn circuit_file_gap_matches_the_string_form() {
    let file = stham(&["gap", "--circuit", &fixture("cnot_ring_4x4.json")]);
    let string = stham(&["gap", "--n", "4", "--D", "4"]);
    let (a, b) = (json(&file), json(&string));
    assert_eq!(a["ground_degeneracy"], 16);
    assert_eq!(a["dim"], 16 * 24);
    assert!((a["gap"].as_f64().unwrap() - b["gap"].as_f64().unwrap()).abs() <= 1e-9);
}

#[test]
fn krylov_path_agrees_with_dense() {
    let krylov = Command::new(env!("CARGO_BIN_EXE_stham"))
        .args(["gap", "--n", "6", "--D", "4"])
        .env("STHAM_DENSE_THRESHOLD", "1")
        .output()
        .unwrap();
    let dense = stham(&["gap", "--n", "6", "--D", "4"]);
    let (k, d) = (json(&krylov), json(&dense));
    assert_eq!(k["solver"]["kind"], "Krylov");
    assert_eq!(d["solver"]["kind"], "Dense");
    assert!((k["gap"].as_f64().unwrap() - d["gap"].as_f64().unwrap()).abs() <= 1e-9);
}

#[test]
fn malformed_circuit_is_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("foo.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = stham(&["gap", "--circuit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    assert!(out.stdout.is_empty());
}

#[test]
fn same_flags_give_identical_bytes() {
    for args in [
        &["gap", "--n", "4", "--D", "6", "--seed", "5"][..],
        &["verify", "--only", "interpolation", "--seed", "3"][..],
        &[
            "markov",
            "--n",
            "4",
            "--D",
            "4",
            "--samples",
            "20000",
            "--seed",
            "9",
        ][..],
        &["fermion", "--seed", "11"][..],
    ] {
        let a = stham(args);
        let b = stham(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn default_verify_grid_passes() {
    let out = stham(&["verify"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v = json(&out);
    let records = v["records"].as_array().unwrap();
    for family in [
        "theorem3",
        "momentum_union",
        "openb",
        "ds_gap",
        "angle_lemma",
        "interpolation",
    ] {
        assert!(records.iter().any(|r| r["check"] == family), "{family}");
    }
    assert_eq!(v["failed"], 0);
    // Two-qubit rings are reported without being asserted.
    assert!(records
        .iter()
        .any(|r| r["check"] == "theorem3" && r["n"] == 2 && r["asserted"] == false));
}

#[test]
fn only_filter_selects_one_family() {
    let v = json(&stham(&["verify", "--only", "ds", "--n", "4"]));
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    assert!(records
        .iter()
        .all(|r| r["n"] == 4 && r["check"].as_str().unwrap().starts_with("ds_")));
}

#[test]
fn frozen_instances_are_refused() {
    let out = stham(&["verify", "--n", "8", "--D", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frozen"));
    let out = stham(&["gap", "--n", "4", "--D", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tightened_tolerance_fails_the_assertion() {
    let out = stham(&["verify", "--only", "momentum", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["tolerance"], 1e-300);
    assert_eq!(v["pass"], false);
}

#[test]
fn qma_toys() {
    let v = json(&stham(&["qma", "--toy", "accept"]));
    assert_eq!(v["report"]["yes_pass"], true);
    assert_eq!(v["pass"], true);
    let v = json(&stham(&["qma", "--toy", "reject"]));
    assert_eq!(v["report"]["no_pass"], true);
    assert!((v["report"]["no"]["ni_worst"].as_f64().unwrap() - 0.875).abs() <= 1e-10);
    let out = stham(&["qma", "--toy", "biased", "--angle", "0.5"]);
    assert!(out.status.success());
    let eps = json(&out)["report"]["epsilon"].as_f64().unwrap();
    assert!((eps - 0.25f64.sin().powi(2)).abs() <= 1e-12);
    assert_eq!(
        stham(&["qma", "--toy", "accept", "--n", "6"]).status.code(),
        Some(2)
    );
    assert_eq!(stham(&["qma", "--toy", "nonsense"]).status.code(), Some(2));
}

#[test]
fn markov_compares_against_the_exact_gap() {
    let out = stham(&["markov", "--n", "6", "--D", "4", "--tv", "0.25"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["mixing"]["steps"].as_u64().unwrap() > 0);
    assert!(v["rate_relative_error"].as_f64().unwrap() <= 0.1);
    assert!(v.get("simulation").is_none());
    assert_eq!(stham(&["markov", "--tv", "0"]).status.code(), Some(2));
}

#[test]
fn fermion_equivalence_passes() {
    let out = stham(&["fermion", "--n", "2", "--T", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["report"]["pass"], true);
    assert!(v["report"]["spectral_diff"].as_f64().unwrap() <= 1e-9);
    assert_eq!(
        stham(&["fermion", "--T", "4", "--D", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tv.csv");
    let out = stham(&[
        "markov",
        "--n",
        "4",
        "--D",
        "4",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,tv"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    let text = String::from_utf8(stham(&["gap", "--format", "csv"]).stdout).unwrap();
    assert!(text.starts_with("index,eigenvalue\n0,"));
}

#[test]
fn thread_override_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_stham"))
        .args(["gap"])
        .env("STHAM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_stham"))
        .args(["gap"])
        .env("STHAM_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}
