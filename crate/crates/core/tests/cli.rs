use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn picklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_picklab"))
        .args(args)
        .env_remove("PICKLAB_TOL")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

const TWO_NODE: &str = r#"{"points": [[[0,0]], [[0.5,0]]], "targets": [[0,0],[0.5,0]]}"#;

#[test]
fn pick_norm_two_node() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.json", TWO_NODE);
    let out = picklab(&["pick-norm", &input]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema_version"], "1");
    assert!((r["computed"]["norm"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
}

#[test]
fn gram_of_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.json", r#"{"points": [[[0.2,0.1],[0,0.3]]]}"#);
    let r = report(&picklab(&["gram", &input]));
    assert_eq!(
        r["computed"]["normalized_gram"],
        serde_json::json!([[[1.0, 0.0]]])
    );
    assert_eq!(r["pass"], true);
}

#[test]
fn curve_half_coefficients_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let b: Vec<[f64; 2]> = (1..=60).map(|k| [0.5_f64.powi(k).sqrt(), 0.0]).collect();
    let input = write(
        dir.path(),
        "c.json",
        &serde_json::json!({ "curve": { "b": b } }).to_string(),
    );
    let csv = dir.path().join("a.csv");
    let out = picklab(&[
        "curve",
        &input,
        "--max-n",
        "50",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let a: Vec<f64> = serde_json::from_value(report(&out)["computed"]["a"].clone()).unwrap();
    assert_eq!(a.len(), 51);
    assert!(a[1..].iter().all(|x| (x - 0.5).abs() < 1e-12));
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next(), Some("n,a_n"));
    assert_eq!(text.lines().count(), 52);
}

#[test]
fn schema_violation_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "bad.json",
        "{\n  \"points\": [[[0,0]]],\n  \"extra\": true\n}",
    );
    let out = picklab(&["gram", &input]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let outside = write(dir.path(), "o.json", r#"{"points": [[[1.0,0]]]}"#);
    assert_eq!(picklab(&["gram", &outside]).status.code(), Some(2));
    let dup = write(
        dir.path(),
        "d.json",
        r#"{"points": [[[0.1,0]], [[0.1,0]]], "targets": [[0,0],[0,0]]}"#,
    );
    assert_eq!(picklab(&["pick-norm", &dup]).status.code(), Some(2));
    assert_eq!(
        picklab(&["gram", "/nonexistent/input.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn unknown_repro_id_lists_registry() {
    let out = picklab(&["repro", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("an-vanish") && err.contains("unitary-check"),
        "{err}"
    );
}

#[test]
fn failing_residual_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "f.json",
        r#"{"automorphism": {"unitary": [[[1,0],[0,0]],[[0,0],[1,0]]], "base_point": [[0.6,0],[0,0.3]]},
            "points": [[[0.1,0.2],[0.3,0]], [[-0.4,0],[0,0.5]], [[0.7,0],[0.1,0.1]]],
            "tol": 1e-30}"#,
    );
    let out = picklab(&["automorphism", &input]);
    assert_eq!(out.status.code(), Some(1));
    let out = picklab(&["automorphism", &input, "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tolerance_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.json", r#"{"points": [[[0.5,0]]]}"#);
    let tol = |out: Output| {
        report(&out)["certificates"][0]["certificate"]["tolerance_used"]
            .as_f64()
            .unwrap()
    };
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_picklab"));
        cmd.env_remove("PICKLAB_TOL").args(["gram", &input]);
        if let Some(e) = env {
            cmd.env("PICKLAB_TOL", e);
        }
        if let Some(f) = flag {
            cmd.args(["--tol", f]);
        }
        cmd.output().unwrap()
    };
    assert_eq!(tol(run(None, None)), 1e-10);
    assert_eq!(tol(run(Some("1e-6"), None)), 1e-6);
    assert_eq!(tol(run(Some("1e-6"), Some("1e-8"))), 1e-8);
}

#[test]
fn reports_rerun_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.json", TWO_NODE);
    let saved = dir.path().join("r.json");
    let saved = saved.to_str().unwrap();
    assert_eq!(
        picklab(&["pick-norm", &input, "--out", saved])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(picklab(&["rerun", saved, "--check"]).status.code(), Some(0));

    let all = dir.path().join("all.json");
    let all = all.to_str().unwrap();
    let first = picklab(&["repro", "all", "--seed", "0x1234", "--out", all]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stdout)
    );
    let second = picklab(&["rerun", all, "--check"]);
    assert_eq!(second.status.code(), Some(0));
    let a = report(&first);
    let b = report(&second);
    let ids: Vec<&str> = a
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["case"].as_str().unwrap())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for (x, y) in a.as_array().unwrap().iter().zip(b.as_array().unwrap()) {
        assert_eq!(x["computed"], y["computed"]);
        assert_eq!(x["inputs"]["options"]["seed"], 0x1234);
    }
}

#[test]
fn every_expectation_has_provenance() {
    let r = report(&picklab(&["repro", "all"]));
    for case in r.as_array().unwrap() {
        for e in case["expected"].as_array().unwrap() {
            let p = e["provenance"].as_str().unwrap();
            assert!(["paper", "trivial", "derived-oracle"].contains(&p), "{p}");
        }
    }
}
