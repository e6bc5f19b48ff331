//! Drives the installed binary end to end over the demo files.

use icek_core::extension::precise_reach_probability;
use icek_core::io;
use std::fs;
use std::process::{Command, Output};

fn icek(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icek"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

#[test]
fn nmeas_prints_the_extension_value() {
    let out = icek(&["nmeas", &data("demo_chain.json"), &data("demo_gamble.json")]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("value:"));

    let out = icek(&[
        "nmeas",
        &data("demo_chain.json"),
        &data("demo_gamble.json"),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let doc = io::parse_model(&fs::read_to_string(data("demo_chain.json")).unwrap()).unwrap();
    let f = io::parse_gamble(
        &fs::read_to_string(data("demo_gamble.json")).unwrap(),
        &doc.names,
    )
    .unwrap();
    let direct = icek_core::extension::williams_nmeasurable(&doc.model, &f).unwrap();
    assert!((v["value"].as_f64().unwrap() - direct).abs() <= 1e-15);
    assert_eq!(v["depth"].as_u64().unwrap(), 2);
}

#[test]
fn reach_and_safety_report_their_certified_scope() {
    let out = icek(&[
        "reach",
        &data("demo_imprecise.json"),
        "--target",
        "a",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["converged"], serde_json::Value::Bool(true));
    assert_eq!(v["vvs_only"], serde_json::Value::Bool(false));
    let val = v["value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&val));

    let out = icek(&[
        "safety",
        &data("demo_imprecise.json"),
        "--safe",
        "a",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["vvs_only"], serde_json::Value::Bool(true));
}

#[test]
fn witness_search_emits_a_verifiable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("cert.json");
    let out = icek(&[
        "witness",
        "search",
        &data("demo_imprecise.json"),
        &data("demo_gamble.json"),
        "--output",
        cert_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(cert_path.exists());

    let out = icek(&[
        "witness",
        "verify",
        &data("demo_imprecise.json"),
        &data("demo_gamble.json"),
        cert_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("valid"));
}

#[test]
fn tampered_certificates_are_rejected_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("cert.json");
    let out = icek(&[
        "witness",
        "search",
        &data("demo_imprecise.json"),
        &data("demo_gamble.json"),
        "--output",
        cert_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let mut cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&cert_path).unwrap()).unwrap();
    let alpha = cert["alpha"].as_f64().unwrap();
    cert["alpha"] = serde_json::json!(alpha + 0.25);
    fs::write(&cert_path, serde_json::to_string(&cert).unwrap()).unwrap();

    let out = icek(&[
        "witness",
        "verify",
        &data("demo_imprecise.json"),
        &data("demo_gamble.json"),
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("INVALID"));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "this is not json").unwrap();
    let out = icek(&["nmeas", bad.to_str().unwrap(), &data("demo_gamble.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn unknown_state_names_exit_two() {
    let out = icek(&["reach", &data("demo_chain.json"), "--target", "zzz"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown state"));
}

#[test]
fn oracle_matches_the_library_and_rejects_imprecision() {
    let out = icek(&[
        "oracle",
        "precise",
        &data("demo_chain.json"),
        "--target",
        "b",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v = json(&out);
    let doc = io::parse_model(&fs::read_to_string(data("demo_chain.json")).unwrap()).unwrap();
    let direct = precise_reach_probability(&doc.model, &[1]).unwrap();
    assert!((v["reach"].as_f64().unwrap() - direct).abs() <= 1e-12);

    let out = icek(&[
        "oracle",
        "precise",
        &data("demo_imprecise.json"),
        "--target",
        "b",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gap_search_runs_deterministically() {
    let out = icek(&[
        "gap-search",
        "--trials",
        "2",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["probes"].as_array().unwrap().len(), 2);
    assert_eq!(v["any_flagged"], serde_json::Value::Bool(false));

    let again = icek(&[
        "gap-search",
        "--trials",
        "2",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    assert_eq!(stdout(&out), stdout(&again));
}

#[test]
fn missing_arguments_exit_two() {
    let out = icek(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn slightly_off_rows_warn_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("off.json");
    fs::write(
        &path,
        r#"{
            "schema": "icek/1",
            "states": ["a", "b"],
            "initial": [[0.5000000001, 0.5]],
            "dynamics": {"stationary": {"rows": [[[1.0, 0.0]], [[0.0, 1.0]]]}}
        }"#,
    )
    .unwrap();
    let out = icek(&["nmeas", path.to_str().unwrap(), &data("demo_gamble.json")]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("warning"));
}
