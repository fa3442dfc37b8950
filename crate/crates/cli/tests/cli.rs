use std::process::{Command, Output};

use serde_json::Value;

fn fliplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fliplab"))
        .args(args)
        .env_remove("FLIPLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn info_reports_complexity_and_exceptionality() {
    let out = fliplab(&["info", "--genus", "0", "--boundary", "6"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["d"], 3);
    assert_eq!(v["exceptional"], false);
    assert_eq!(v["triangle_count_check"], true);

    let v = json(&fliplab(&["info", "--genus", "1", "--punctures", "1"]));
    assert_eq!(v["d"], 3);
    assert_eq!(v["exceptional"], true);

    let v = json(&fliplab(&["info", "--genus", "0", "--boundary", "1,1"]));
    assert_eq!(v["d"], 2);
    assert_eq!(v["exceptional"], true);
    assert_eq!(v["exceptional_by_predicate"]["whitelist"], true);
}

#[test]
fn enumerate_hexagon_writes_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = fliplab(&["enumerate", "--surface", "disk6", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["stats"]["vertices"], 14);
    assert_eq!(v["stats"]["edges"], 21);
    assert_eq!(v["stats"]["degree_histogram"], serde_json::json!([[3, 14]]));
    let graph: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("graph.json")).unwrap()).unwrap();
    assert_eq!(graph["vertices"].as_array().unwrap().len(), 14);
}

#[test]
fn enumerate_dot_and_models() {
    let dir = tempfile::tempdir().unwrap();
    let out = fliplab(&["enumerate", "--genus", "0", "--boundary", "8", "--format", "dot", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(json(&out)["stats"]["vertices"], 132);
    let dot = std::fs::read_to_string(dir.path().join("graph.dot")).unwrap();
    assert!(dot.starts_with("graph flips {"));

    let v = json(&fliplab(&["enumerate", "--surface", "punctured4", "--model", "punctured"]));
    assert_eq!(v["vertices"], 35);
    let out = fliplab(&["enumerate", "--surface", "disk6", "--model", "punctured"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn infinite_graph_hits_budget() {
    let out = fliplab(&["enumerate", "--genus", "1", "--punctures", "1", "--max-vertices", "200"]);
    assert_eq!(out.status.code(), Some(3));
    let out = fliplab(&["enumerate", "--genus", "1", "--punctures", "1", "--radius", "3"]);
    assert!(out.status.success());
    // Trivalent tree: 1 + 3 + 6 + 12.
    assert_eq!(json(&out)["stats"]["vertices"], 22);
}

#[test]
fn bad_input_exits_four() {
    assert_eq!(fliplab(&["enumerate", "--boundary", "0"]).status.code(), Some(4));
    assert_eq!(fliplab(&["enumerate", "--surface", "klein3"]).status.code(), Some(4));
    assert_eq!(fliplab(&["verify", "--suite", "nonsense"]).status.code(), Some(4));
    assert_eq!(fliplab(&["info", "--predicate", "vibes", "--surface", "disk5"]).status.code(), Some(4));
    assert_eq!(fliplab(&["--help"]).status.code(), Some(0));
}

#[test]
fn rigidity_summary_line() {
    let out = fliplab(&["verify", "--suite", "rigidity", "--domain", "disk5", "--codomain", "disk6"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["suites"][0]["summary"], "maps=60 matched=60 unmatched=0");
}

#[test]
fn default_verify_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = fliplab(&["verify", "--out", dir.path().to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    let b = fliplab(&["verify"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 8);
    let saved = std::fs::read(dir.path().join("report.json")).unwrap();
    assert_eq!(saved, a.stdout.strip_suffix(b"\n").unwrap());
}

#[test]
fn seed_is_recorded_and_overridable() {
    let v = json(&fliplab(&["verify", "--suite", "coords", "--seed", "11"]));
    assert_eq!(v["seed"], 11);
    let out = Command::new(env!("CARGO_BIN_EXE_fliplab"))
        .args(["verify", "--suite", "coords", "--seed", "11"])
        .env("FLIPLAB_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["seed"], 99);
}

#[test]
fn corrupted_flip_rule_is_caught() {
    let out = fliplab(&["verify", "--suite", "flip-contract", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["fault_injected"], true);
    let violations = v["suites"][0]["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    assert_eq!(violations[0]["kind"], "flip-result");
}

#[test]
fn verify_budget_exits_three() {
    let out = fliplab(&["verify", "--suite", "rigidity", "--domain", "disk6", "--codomain", "disk7", "--max-vertices", "20"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["suites"][0]["budget_exceeded"], true);
}
