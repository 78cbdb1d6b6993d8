use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn causal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causal")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(stdout(out).trim()).expect("one JSON document")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sprinkle_is_reproducible() {
    let args = ["sprinkle", "--dim", "1", "--box", "0:1,0:1", "--n", "50", "--seed", "42"];
    let (a, b) = (causal(&args), causal(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    assert_eq!(doc["events"].as_array().unwrap().len(), 50);
    assert_eq!(doc["causality"]["points"][49], "e49");
    assert_ne!(stdout(&causal(&["sprinkle", "--n", "50", "--seed", "43"])), stdout(&a));
}

#[test]
fn empty_sprinkle() {
    let out = causal(&["sprinkle", "--n", "0", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["events"], Value::Array(vec![]));
    assert_eq!(doc["causality"]["points"], Value::Array(vec![]));
}

#[test]
fn lattice_sprinkle_is_the_product_order() {
    let out = causal(&["sprinkle", "--mode", "lattice", "--box", "0:2,0:2"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["causality"]["points"].as_array().unwrap().len(), 9);
    let expected = causal_core::io::causality_to_json(&causal_core::fixtures::l33());
    let expected: Value = serde_json::from_str(&expected).unwrap();
    assert_eq!(doc["causality"]["relation"], expected["relation"]);
}

#[test]
fn sprinkle_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let out = causal(&["sprinkle", "--n", "5", "--seed", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, stdout(&causal(&["sprinkle", "--n", "5", "--seed", "3"])));
    // Sprinkle output is accepted as input.
    assert_eq!(code(&causal(&["verify", "--input", path.to_str().unwrap(), "--suite", "crossing"])), 0);
}

#[test]
fn broken_transitivity_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        r#"{"points":["a","b","c"],"relation":[[1,1,0],[0,1,1],[0,0,1]]}"#,
    );
    let out = causal(&["verify", "--input", &path]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("transitiv"));
}

#[test]
fn cover_relations_are_closed_on_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "cover.json",
        r#"{"points":["a","b","c"],"relation":[[1,1,0],[0,1,1],[0,0,1]],"closure":"cover"}"#,
    );
    assert_eq!(code(&causal(&["verify", "--input", &path, "--suite", "crossing,axioms"])), 0);
}

#[test]
fn missing_input_is_a_usage_error() {
    assert_eq!(code(&causal(&["verify", "--input", "/nonexistent/c.json"])), 1);
    assert_eq!(code(&causal(&["verify", "--fixture", "nope"])), 1);
    assert_eq!(code(&causal(&["frobnicate"])), 1);
}

#[test]
fn chain_fails_only_the_union_laws() {
    let out = causal(&["verify", "--fixture", "chain3"]);
    assert_eq!(code(&out), 2);
    let lines: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let failing: Vec<&str> = lines
        .iter()
        .filter(|l| l["verdict"] == "fails")
        .map(|l| l["law"].as_str().unwrap())
        .collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|law| law.starts_with("union_IV_") || law.starts_with("union_V_")), "{failing:?}");
    let ok = causal(&["verify", "--fixture", "chain3", "--suite", "crossing,axioms,t-reversal,measure"]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
}

#[test]
fn l5_fails_union_closure() {
    let out = causal(&["verify", "--fixture", "l5", "--suite", "axioms"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("axiom_union_closed"));
}

#[test]
fn measure_file_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "m.json",
        r#"{"kind":"divergent","entries":[{"set":[],"sigma":1},{"set":["a"],"sigma":1},{"set":["b"],"sigma":1},{"set":["c"],"sigma":1},{"set":["a","b"],"sigma":2},{"set":["b","c"],"sigma":1},{"set":["a","b","c"],"sigma":1}]}"#,
    );
    let out = causal(&["verify", "--fixture", "chain3", "--suite", "measure", "--measure", &path]);
    assert_eq!(code(&out), 2, "{}{}", stdout(&out), String::from_utf8_lossy(&out.stderr));
}

#[test]
fn entropy_of_truncated_cones() {
    let one = json(&causal(&["entropy", "--shape", "future-cone", "--t", "1", "--alpha", "1"]));
    assert!((one["entropy"].as_f64().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    let out = causal(&["entropy", "--t", "2", "--mc-samples", "1000000", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    let two = json(&out);
    assert_eq!(format!("{:.5}", two["entropy"].as_f64().unwrap()), "50.26548");
    assert_eq!(two["monte_carlo"]["within_tolerance"], true);
    let bh = json(&causal(&["entropy", "--t", "1", "--bh", "--kB", "1", "--l-p", "1"]));
    assert!((bh["entropy"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn untruncated_cone_is_unbounded() {
    let out = causal(&["entropy", "--shape", "future-cone"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["unbounded"], true);
    assert_eq!(doc["entropy"], Value::Null);
}

#[test]
fn diamond_requires_a_top() {
    assert_eq!(code(&causal(&["entropy", "--shape", "diamond"])), 1);
    let out = causal(&["entropy", "--shape", "diamond", "--top", "2,0,0,0"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["entropy"].as_f64().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn reconstruct_reports_every_point() {
    let out = causal(&["reconstruct", "--fixture", "l33"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    let per_point = doc["per_point"].as_array().unwrap();
    assert_eq!(per_point.len(), 9);
    let centre = per_point.iter().find(|p| p["id"] == "(1,1)").unwrap();
    assert_eq!(centre["status"], "irregular");
    assert_eq!(centre["ribbon_pairs"], 9);
    assert_eq!(doc["theorem_violations"], Value::Array(vec![]));
}

#[test]
fn dot_lists_cover_edges() {
    let out = causal(&["dot", "--fixture", "chain3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("->").count(), 2);
}

#[test]
fn caps_exit_with_three() {
    assert_eq!(code(&causal(&["verify", "--fixture", "l33", "--max-n", "4"])), 3);
    let big = causal(&["sprinkle", "--n", "30", "--seed", "1"]);
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "big.json", &stdout(&big));
    assert_eq!(code(&causal(&["reconstruct", "--input", &path])), 3);
}

#[test]
fn config_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "seed = 42\nalpha = 2.0\n");
    let from_cfg = causal(&["--config", &cfg, "sprinkle", "--n", "10"]);
    assert_eq!(from_cfg.stdout, causal(&["sprinkle", "--n", "10", "--seed", "42"]).stdout);
    let s = json(&causal(&["--config", &cfg, "entropy", "--t", "1"]));
    assert!((s["entropy"].as_f64().unwrap() - 8.0 * std::f64::consts::PI).abs() < 1e-12);
    let bad = write(dir.path(), "bad.toml", "sede = 1\n");
    assert_eq!(code(&causal(&["--config", &bad, "sprinkle"])), 1);
}
