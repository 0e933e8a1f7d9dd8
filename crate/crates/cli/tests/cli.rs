use std::process::{Command, Output};

use serde_json::Value;

fn pathmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathmem"))
        .args(args)
        .env_remove("PATHMEM_THREADS")
        .output()
        .expect("spawn pathmem")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn json(args: &[&str]) -> Value {
    let out = pathmem(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn validate(doc: &Value) {
    let schema: Value = serde_json::from_str(include_str!("../schemas/output.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn verify_small_code_passes() {
    let out = pathmem(&["verify", "--n", "7", "--p", "2", "--list", "4", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("PASS cross-model equivalence: 200 passed, 0 failed"), "{text}");
    assert!(text.contains("PASS recovery round-trip"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "--n", "7", "--p", "0", "--list", "4"][..],
        &["verify", "--n", "7", "--p", "2", "--list", "3"],
        &["verify", "--n", "7", "--p", "7", "--list", "4"],
        &["schedule", "--kind", "psn", "--lambda", "1", "--p", "2"],
        &["fer", "--n", "6", "--p", "2", "--ebn0", "1", "--frames", "0"],
        &["report", "--n", "7"],
        &["bogus"],
    ] {
        let out = pathmem(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn schedule_csv_matches_figure_tables() {
    let out = pathmem(&["schedule", "--kind", "psn", "--lambda", "3", "--p", "1", "--csv"]);
    assert_eq!(body(&stdout(&out)), include_str!("../../core/tests/golden/fig1c.csv"));
    let out = pathmem(&["schedule", "--kind", "recovery", "--lambda", "3", "--p", "1", "--csv"]);
    assert_eq!(body(&stdout(&out)), include_str!("../../core/tests/golden/fig5c.csv"));
}

#[test]
fn trivial_recovery_has_no_cycles() {
    let doc = json(&["schedule", "--kind", "recovery", "--lambda", "1", "--p", "1", "--json"]);
    validate(&doc);
    assert_eq!(doc["result"]["cycles"], 0);
}

#[test]
fn report_values() {
    let doc = json(&["report", "--n", "10", "--p", "6", "--list", "8", "--json"]);
    validate(&doc);
    let r = &doc["result"];
    let rows = r["memory"]["rows"].as_array().unwrap();
    let row = |name: &str| rows.iter().find(|x| x["architecture"] == name).unwrap().clone();
    assert_eq!(row("folded-psn")["sram_size"], 512);
    assert_eq!(row("folded-psn")["sram_port_width"], 128);
    assert_eq!(row("merged-memory")["sram_size"], 1024);
    assert_eq!(r["cycles_with_recovery"]["total_decode_cycles"], 2080);
    assert_eq!(r["cycles_without_recovery"]["total_decode_cycles"], 2080);
    assert_eq!(r["cycles_with_recovery"]["stall_cycles"], 0);
    let first = &r["bounds"][0];
    assert_eq!(first["length"], 512);
    assert_eq!(first["latency"], 12);
    assert_eq!(first["budget"], 504);
}

#[test]
fn report_large_code_does_not_stall() {
    let doc = json(&["report", "--n", "20", "--p", "6", "--json"]);
    validate(&doc);
    assert_eq!(doc["result"]["cycles_with_recovery"]["stall_cycles"], 0);
    let out = pathmem(&["report", "--n", "20", "--p", "6"]);
    assert!(stdout(&out).contains("merged-memory"));
}

#[test]
fn small_parallelism_report_shows_stalls() {
    let doc = json(&["report", "--n", "8", "--p", "1", "--list", "4", "--json"]);
    validate(&doc);
    let stalled = doc["result"]["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .any(|b| b["outcome"]["outcome"] == "stalls");
    assert!(stalled);
}

#[test]
fn fer_is_deterministic() {
    let args = ["fer", "--n", "6", "--p", "2", "--list", "4", "--ebn0", "1,2", "--frames", "150", "--seed", "9"];
    let a = pathmem(&args);
    let b = pathmem(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut with_threads = vec!["--threads", "1"];
    with_threads.extend(args);
    assert_eq!(pathmem(&with_threads).stdout, a.stdout);
    let text = stdout(&a);
    assert!(text.contains("# seed: 9"));
    assert_eq!(body(&text).lines().count(), 3);
}

#[test]
fn fer_json_and_memory_kinds_agree() {
    let base = ["fer", "--n", "6", "--p", "2", "--list", "2", "--ebn0", "1.5", "--frames", "60", "--json"];
    let mut results = Vec::new();
    for kind in ["traditional", "folded", "merged"] {
        let mut args = base.to_vec();
        args.extend(["--memory", kind]);
        let doc = json(&args);
        validate(&doc);
        results.push(doc["result"].clone());
    }
    assert_eq!(results[0], results[1]);
    assert_eq!(results[1], results[2]);
}

#[test]
fn verify_json_validates() {
    let doc = json(&["verify", "--n", "6", "--p", "2", "--list", "2", "--trials", "5", "--json", "--timestamp"]);
    validate(&doc);
    assert_eq!(doc["result"]["passed"], true);
    assert!(doc["manifest"]["timestamp"].is_string());
}
