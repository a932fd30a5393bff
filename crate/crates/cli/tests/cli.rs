use std::process::{Command, Output};

use serde_json::Value;

fn luinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_luinv")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn enumerate_listings() {
    let out = luinv(&["enumerate", "--m", "3", "--r", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 11);

    let out = luinv(&["enumerate", "--m", "2", "--r", "3", "--generators-only"]);
    assert_eq!(stdout(&out).lines().count(), 7);
    assert!(stdout(&out).lines().all(|l| l.ends_with("\ttransitive")));

    let out = luinv(&["enumerate", "--m", "1", "--r", "5"]);
    assert_eq!(stdout(&out), "e,e,e,e,e\ttransitive\n");

    let out = luinv(&["enumerate", "--m", "3", "--k", "4", "--kind", "pure", "--count"]);
    assert_eq!(stdout(&out).trim(), "49");

    let out = luinv(&["enumerate", "--m", "2", "--r", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["labels"].as_array().unwrap().len(), 4);
}

#[test]
fn eval_on_stored_states() {
    let dir = tempfile::tempdir().unwrap();
    let ghz = dir.path().join("ghz.json");
    let ghz = ghz.to_str().unwrap();
    assert!(luinv(&["state", "--preset", "ghz", "--k", "3", "--n", "2", "-o", ghz]).status.success());

    let out = luinv(&["eval", "--m", "3", "--label", "s,s2", "--state", ghz]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!((v["value"][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((v["closed_form"][0].as_f64().unwrap() - 2.0).abs() < 1e-12);

    let psi = dir.path().join("psi.json");
    let psi = psi.to_str().unwrap();
    luinv(&["state", "--dims", "2,3", "--seed", "4", "-o", psi]);
    let text = std::fs::read_to_string(psi).unwrap();
    let state: Value = serde_json::from_str(&text).unwrap();
    let norm: f64 = state["data"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap().iter())
        .map(|z| z[0].as_f64().unwrap().powi(2) + z[1].as_f64().unwrap().powi(2))
        .sum();
    let out = luinv(&["eval", "--m", "1", "--label", "e", "--state", psi]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["value"][0].as_f64().unwrap() - norm).abs() < 1e-12 * norm);

    let rho = dir.path().join("rho.json");
    let rho = rho.to_str().unwrap();
    luinv(&["state", "--dims", "2,2", "--kind", "mixed", "--seed", "1", "-o", rho]);
    let out = luinv(&["eval", "--m", "3", "--label", "t,s", "--formula", "Tr((I[1] (x) tr[1](rho)) * rho^2)", "--state", rho]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["difference"].as_f64().unwrap() < 1e-12);
}

#[test]
fn eval_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    let rho = rho.to_str().unwrap();
    luinv(&["state", "--dims", "2,2", "--kind", "mixed", "--seed", "1", "-o", rho]);
    let out = luinv(&["eval", "--m", "2", "--label", "t,e", "--formula", "Tr(rho^2)", "--state", rho]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn graph_views() {
    let out = luinv(&["graph", "--m", "3", "--k", "2", "--label", "s", "--decompose"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("classes\t4"));

    let out = luinv(&["graph", "--m", "2", "--label", "t", "--dot"]);
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("label=\"2\"").count(), 2);
    assert!(dot.contains("1 -> 1 [color=\"red\", label=\"2\"]"));
    assert_eq!(dot, stdout(&luinv(&["graph", "--m", "2", "--label", "t", "--dot"])));

    let out = luinv(&["graph", "--m", "4", "--kind", "mixed", "--label", "[2,3,4,1],[3,2,1,4]", "--expressible"]);
    assert!(stdout(&out).contains("ordering\tnone"));
    let out = luinv(&["graph", "--m", "3", "--kind", "mixed", "--label", "s,t", "--expressible", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ordering"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = luinv(&["verify", "--suite", "counts", "--report", report.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["reports"][0]["passed"], true);

    assert!(luinv(&["verify", "--suite", "purification", "--seed", "3"]).status.success());
    assert_eq!(luinv(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dims\":[2],\"kind\":\"pure\",\"data\":[[1,0]").unwrap();
    let out = luinv(&["eval", "--m", "1", "--label", "e", "--state", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    assert_eq!(luinv(&["enumerate", "--m", "3", "--r", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(luinv(&["graph", "--m", "3", "--label", "q"]).status.code(), Some(2));
    assert_eq!(luinv(&["state", "--dims", "100,100"]).status.code(), Some(3));
    assert_eq!(luinv(&["enumerate", "--m", "9", "--r", "1"]).status.code(), Some(3));
    assert_eq!(luinv(&["--max-dim", "4", "state", "--dims", "2,3"]).status.code(), Some(3));
}
