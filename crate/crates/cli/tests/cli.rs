use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tropical(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropical")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = tropical(args);
    assert!(out.status.success(), "{args:?}: {}", stdout(&out));
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn genus() {
    let out = tropical(&["genus", "--curve", "theta"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2\n");
    assert_eq!(stdout(&tropical(&["genus", "--curve", "star3.json"])), "0\n");
}

#[test]
fn recover_rotation() {
    let v = json(&["recover", "--map", "rot_circ2", "--trials", "4"]);
    assert_eq!(v["r"], "1");
    assert_eq!(v["success"], true);
    let pairs = v["pairs"].as_array().unwrap();
    assert!((2..=5).contains(&pairs.len()), "samples are deduplicated");
    assert_eq!(pairs[0], serde_json::json!(["v0", "loop@1/2"]));
}

#[test]
fn automorphisms_of_star3() {
    let v = json(&["aut", "--curve", "star3", "--generators"]);
    assert_eq!(v["generators"].as_array().unwrap().len(), 2);
    assert_eq!(v["closure_size"], 6);
    assert!(v.get("elements").is_none());
    let v = json(&["aut", "--curve", "star3"]);
    assert_eq!(v["elements"].as_array().unwrap().len(), 6);
}

#[test]
fn classify() {
    let v = json(&["classify", "--curve", "pt"]);
    assert_eq!(v["star_infinite"], true);
    assert_eq!(v["nonunit_dilation"], true);
    let v = json(&["classify", "--curve", "theta"]);
    assert_eq!(v["nonunit_dilation"], false);
    assert_eq!(v["witness_r"], Value::Null);
}

#[test]
fn verify_suites() {
    for suite in ["homlaws", "lemma4", "cor3"] {
        let v = json(&["verify", "--map", "dilate_star3", "--suite", suite, "--trials", "20"]);
        assert_eq!(v["ok"], true, "{suite}");
        assert_eq!(v["passed"], 20);
    }
}

#[test]
fn harmonic_degrees() {
    assert_eq!(json(&["check-harmonic", "--data", "double_cover"])["degree"], 2);
    assert_eq!(json(&["check-harmonic", "--map", "iota_line"])["degree"], 1);
}

#[test]
fn exit_codes() {
    let out = tropical(&["genus", "--curve", "no/such/file.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(err["error"], "Parse");

    let out = tropical(&["cf-point", "--curve", "ray", "--point", "v1", "--eps", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(serde_json::from_str::<Value>(&stdout(&out)).unwrap()["error"], "PointAtInfinity");

    assert_eq!(tropical(&["genus"]).status.code(), Some(2));
    assert_eq!(tropical(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn out_file_and_function_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let fs = f.to_str().unwrap();
    let out = tropical(&["cf-point", "--curve", "circ2", "--point", "v0", "--eps", "1/2", "--out", fs]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(Path::new(fs).exists());

    assert_eq!(stdout(&tropical(&["eval", "--fn", fs, "--point", "loop@1"])), "-1/2\n");
    let d = json(&["divisor", "--fn", fs]);
    let orders: i64 = d.as_array().unwrap().iter().map(|e| e["order"].as_i64().unwrap()).sum();
    assert_eq!(orders, 0);
    assert_eq!(d.as_array().unwrap().len(), 3);

    let x = json(&["extrema", "--fn", fs]);
    assert_eq!(x["max"], "0");
    assert_eq!(x["min"], "-1/2");

    let dot = stdout(&tropical(&["export-dot", "--fn", fs, "--divisor"]));
    assert!(dot.starts_with("graph curve {"));
    assert!(dot.contains("xlabel=\"\u{2212}2\""));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["recover", "--map", "dilate_star3", "--seed", "7", "--trials", "6"];
    let (a, b) = (tropical(&args), tropical(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = tropical(&["recover", "--map", "dilate_star3", "--seed", "8", "--trials", "6"]);
    assert_ne!(a.stdout, other.stdout);
}
