use std::fs;
use std::process::{Command, Output};

use markoff::pathfinder::{verify_path, PathCertificate};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markoff")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn hash_one_step() {
    // label (1 + 1) mod 3 + 1 = 3 applied to (1,1,1) gives (1,1,2)
    assert_eq!(stdout(&["hash", "--p", "13", "--k", "1", "--bits", "1"]), "010102\n");
    assert_eq!(stdout(&["hash", "--p", "0xd", "--k", "3", "--bits", "10011"]), "030b00\n");
}

#[test]
fn hash_file_input_matches_bits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("input.bin");
    fs::write(&path, [0b1010_0001u8]).unwrap();
    let from_file = stdout(&["hash", "--p", "101", "--file", path.to_str().unwrap()]);
    let from_bits = stdout(&["hash", "--p", "101", "--bits", "10100001"]);
    assert_eq!(from_file, from_bits);
}

#[test]
fn hash_with_big_modulus_and_start() {
    let p = "0xffffffffffffffffffffffffffffff61";
    let digest = stdout(&["hash", "--p", p, "--bits", &"01".repeat(80)]);
    assert_eq!(digest.trim().len(), 96);
    assert_eq!(stdout(&["hash", "--p", "13", "--start", "1,1,2", "--bits", "0"]).trim().len(), 6);
    assert_eq!(run(&["hash", "--p", "13", "--start", "1,1,3", "--bits", "0"]).status.code(), Some(2));
}

#[test]
fn short_input_warns() {
    let out = run(&["hash", "--p", "997", "--bits", "01"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["hash", "--p", "13", "--bits", "1", "--nope"][..],
        &["frobnicate"][..],
        &["hash", "--p", "13"][..],
        &["hash", "--p", "13", "--k", "4", "--bits", "1"][..],
        &["hash", "--p", "15", "--bits", "1"][..],
        &["find-path", "--p", "17", "--from", "1,1,3", "--to", "1,1,1"][..],
        &["hash", "--p", "13", "--bits", "012"][..],
        &["sample", "--p", "13", "--length", "0"][..],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn find_path_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    for graph in ["g", "ghat"] {
        let path = dir.path().join(format!("{graph}.json"));
        let path = path.to_str().unwrap();
        let out = run(&["find-path", "--p", "101", "--from", "1,1,1", "--to", "1,2,5", "--graph", graph, "--out", path]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        let cert = PathCertificate::from_json(&fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(verify_path(&cert), Ok(()));
        let report = json(&["verify-path", "--cert", path]);
        assert_eq!(report["valid"], true);
        assert_eq!(report["schema_version"], "1.0");
    }
}

#[test]
fn find_path_policies() {
    let base = ["find-path", "--p", "499", "--from", "1,1,1", "--to", "1,2,5"];
    let plain = json(&base);
    let greedy = json(&[&base[..], &["--greedy"]].concat());
    let random = json(&[&base[..], &["--random-coords", "--seed", "3"]].concat());
    for c in [&plain, &greedy, &random] {
        assert_eq!(c["end"], serde_json::json!([1, 2, 5]));
    }
    assert_eq!(random, json(&[&base[..], &["--random-coords", "--seed", "3"]].concat()));
}

#[test]
fn tampered_certificate_exits_1_with_index() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let path = path.to_str().unwrap();
    stdout(&["find-path", "--p", "17", "--from", "15,0,8", "--to", "12,5,8", "--out", path]);
    let mut cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    cert["end"] = serde_json::json!([11, 12, 8]);
    fs::write(path, cert.to_string()).unwrap();
    let out = run(&["verify-path", "--cert", path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("index 4"));

    cert["schema_version"] = serde_json::json!("2.0");
    fs::write(path, cert.to_string()).unwrap();
    assert_eq!(run(&["verify-path", "--cert", path]).status.code(), Some(1));
}

#[test]
fn descend_and_lift() {
    let d = json(&["descend", "--triple", "29,-169,-14701"]);
    assert_eq!(d["moves"], serde_json::json!([3, 2, 1, 2, 3]));
    assert_eq!(d["terminal"], serde_json::json!(["1", "-1", "-1"]));
    assert_eq!(run(&["descend", "--triple", "1,2,3"]).status.code(), Some(2));

    let l = json(&["lift", "--p", "7", "--target", "1,2,5", "--bound", "10"]);
    assert_eq!(l["lift"], serde_json::json!(["1", "2", "5"]));
    let miss = ["lift", "--p", "997", "--target", "1,2,5", "--bound", "2"];
    assert_eq!(json(&miss)["lift"], serde_json::Value::Null);
    assert_eq!(run(&[&miss[..], &["--require-success"]].concat()).status.code(), Some(1));
    assert_eq!(run(&["lift", "--p", "997", "--target", "2,3,9"]).status.code(), Some(2));
}

#[test]
fn lift_attack_outputs_certificate_or_absence() {
    let c = stdout(&["lift-attack", "--p", "7", "--from", "1,2,5", "--to", "1,6,6", "--bound", "100"]);
    let cert = PathCertificate::from_json(&c).unwrap();
    assert_eq!(verify_path(&cert), Ok(()));

    // tiny bound: only (1,1,1) and its images lift
    let absent = ["lift-attack", "--p", "997", "--from", "1,1,1", "--to", "1,2,5", "--bound", "2"];
    assert_eq!(json(&absent)["found"], false);
    assert_eq!(run(&[&absent[..], &["--require-success"]].concat()).status.code(), Some(1));
}

#[test]
fn enumerate_orders_cage() {
    let s = json(&["enumerate", "--p", "13", "--summary"]);
    assert_eq!(s["vertex_count"], 208);
    assert_eq!(s["expected_vertex_count"], 208);
    assert_eq!(s["component_count"], 1);
    let adjacency = stdout(&["enumerate", "--p", "7", "--graph", "ghat"]);
    assert_eq!(adjacency.lines().count(), 28);

    let orders = stdout(&["orders", "--p", "17"]);
    assert!(orders.starts_with("element,order,type,maximal\n"));
    assert!(orders.contains("\n5,34,parabolic,true\n"));

    let cage = json(&["cage", "--p", "17"]);
    let proportion = cage["proportion"].as_f64().unwrap();
    assert!(proportion > 0.0 && proportion <= 1.0);
}

#[test]
fn campaigns_and_measurements() {
    let bench = stdout(&["bench-bgs", "--pmax", "30", "--trials", "5", "--seed", "1"]);
    let mut lines = bench.lines();
    assert_eq!(lines.next(), Some("p,eta_p,avg_len,avg_ms,cage_prop"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "5");
    assert_eq!(first[3], "", "avg_ms stays empty without --timing");
    let timed = stdout(&["bench-bgs", "--pmax", "7", "--trials", "2", "--timing"]);
    assert!(!timed.lines().nth(1).unwrap().split(',').nth(3).unwrap().is_empty());

    assert_eq!(stdout(&["analyze", "--pmin", "4", "--pmax", "4"]).lines().count(), 1);
    let analyze = stdout(&["analyze", "--pmax", "20", "--trials", "3"]);
    assert_eq!(analyze.lines().count(), 1 + 6);

    let spectrum = stdout(&["spectrum", "--p", "29", "--lmax", "4"]);
    assert!(spectrum.starts_with("L,graph_moment,km_moment,std_error\n0,1.0,"));

    let samples = stdout(&["sample", "--p", "101", "--length", "20", "--trials", "10", "--seed", "4"]);
    assert_eq!(samples.lines().count(), 11);
    assert_eq!(samples, stdout(&["sample", "--p", "101", "--length", "20", "--trials", "10", "--seed", "4"]));

    let param = json(&["param-check", "--p", "1000003"]);
    assert_eq!(param["smoothness_pass"], false);
    assert_eq!(param["bit_len"], 20);
}
