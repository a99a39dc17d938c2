use std::process::{Command, Output};

use serde_json::Value;

fn rrqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrqc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = rrqc(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v)
}

#[test]
fn switch_all_receivers_perfect() {
    let (code, v) = json(&["protocol", "--variant", "switch", "--n", "3", "--x", "ALL", "--message", "0.6,0.8i"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["records"].as_array().unwrap().len(), 3);
    assert!((v["summary"]["min_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["records"][0]["message"]["beta"], serde_json::json!([0.0, 0.8]));
    assert_eq!(v["config"]["tolerance"], 1e-9);
    assert_eq!(v["config"]["seed"], 0);
}

#[test]
fn noiseless_two_receivers() {
    let (code, v) = json(&["protocol", "--variant", "noiseless", "--n", "2", "--x", "1", "--message", "1,0"]);
    assert_eq!(code, 0);
    assert!((v["summary"]["mean_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn baseline_haar_mean() {
    let (code, v) = json(&[
        "--seed",
        "7",
        "--tolerance",
        "0.01",
        "protocol",
        "--variant",
        "baseline",
        "--n",
        "2",
        "--x",
        "1",
        "--message",
        "HAAR(10000)",
        "--expect-fidelity",
        "0.6666666666666666",
    ]);
    assert_eq!(code, 0);
    let mean = v["summary"]["mean_fidelity"].as_f64().unwrap();
    assert!((mean - 2.0 / 3.0).abs() < 0.01, "{mean}");
}

#[test]
fn baseline_plus_fails_perfect_expectation() {
    let (code, v) = json(&["protocol", "--variant", "baseline", "--n", "2", "--x", "1", "--message", "1,1", "--expect-fidelity", "1"]);
    assert_eq!(code, 2);
    assert!((v["summary"]["mean_fidelity"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn unnormalized_message_warns() {
    let out = rrqc(&["protocol", "--variant", "noiseless", "--n", "2", "--x", "1", "--message", "3,4i"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn validate_switch_examples() {
    let (code, v) = json(&["--seed", "1", "validate-switch", "--n", "2", "--trials", "100"]);
    assert_eq!(code, 0);
    assert!(v["summary"]["max_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["records"].as_array().unwrap().len(), 100);

    let (code, v) = json(&["validate-switch", "--n", "1", "--trials", "1", "--channels", "identity"]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["max_deviation"].as_f64().unwrap(), 0.0);

    let out = rrqc(&["validate-switch", "--n", "3", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("runtime"));
}

#[test]
fn nogo_scan_examples() {
    let (code, v) = json(&["nogo-scan", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["cells"], 48);
    assert_eq!(v["summary"]["counterexamples"], 0);

    let (code, v) = json(&["nogo-scan", "--n", "2"]);
    assert_eq!(code, 0);
    let recs = v["records"].as_array().unwrap();
    assert!(recs.iter().any(|r| r["tau"] == serde_json::json!([2, 1]) && r["bits"] == "01"));

    let (code, v) = json(&["nogo-scan", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["cells"], 120 * 32);
    assert_eq!(v["summary"]["counterexamples"], 0);

    assert_eq!(rrqc(&["nogo-scan", "--n", "8"]).status.code(), Some(1));
}

#[test]
fn eb_check_examples() {
    let (code, v) = json(&["eb-check", "--channel", "nxy", "--expect", "eb"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"][0]["entanglement_breaking"], true);
    assert!(v["records"][0]["min_pt_eigenvalue"].as_f64().unwrap().abs() < 1e-12);

    let (code, v) = json(&["eb-check", "--channel", "identity"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"][0]["entanglement_breaking"], false);
    assert!((v["records"][0]["min_pt_eigenvalue"].as_f64().unwrap() + 0.5).abs() < 1e-12);

    let (code, v) = json(&["eb-check", "--weights", "0.25,0.25,0.25,0.25"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"][0]["entanglement_breaking"], true);

    assert_eq!(rrqc(&["eb-check", "--channel", "identity", "--expect", "eb"]).status.code(), Some(2));
    assert_eq!(rrqc(&["eb-check", "--weights", "0.5,0.5,0.5,0"]).status.code(), Some(1));
}

#[test]
fn exit_codes_for_usage() {
    assert_eq!(rrqc(&["protocol", "--variant", "switch", "--n", "3", "--x", "4"]).status.code(), Some(1));
    assert_eq!(rrqc(&["protocol", "--variant", "switch", "--n", "3", "--message", "1"]).status.code(), Some(1));
    assert_eq!(rrqc(&["bogus"]).status.code(), Some(1));
    assert_eq!(rrqc(&["--help"]).status.code(), Some(0));
    assert_eq!(rrqc(&["--version"]).status.code(), Some(0));
}

#[test]
fn json_is_byte_identical() {
    let args = ["--format", "json", "--seed", "11", "protocol", "--variant", "switch", "--n", "2", "--message", "HAAR(3)", "--transcript"];
    let a = rrqc(&args);
    let b = rrqc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["records"][0]["branches"][0]["transcript"]["events"].is_array());
}

#[test]
fn csv_rows_per_branch() {
    let out = rrqc(&["--format", "csv", "protocol", "--variant", "switch", "--n", "2", "--x", "ALL", "--message", "1,0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("case,variant,n,x"));
    // 2 cases, 4 branches each
    assert_eq!(lines.len(), 1 + 8);
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("rrqc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = rrqc(&["--format", "json", "--output", path.to_str().unwrap(), "nogo-scan", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["summary"]["counterexamples"].as_u64().unwrap() > 0);
    std::fs::remove_dir_all(&dir).unwrap();
}
