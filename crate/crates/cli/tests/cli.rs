use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutcover"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_counterexample_half_integral() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let trace = dir.path().join("t.json");
    let o = run(&["solve", "--algorithm", "wgmv-half", s(&data("counterexample.json")), "-o", s(&cert), "--trace", s(&trace)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["half_integral"], Value::Bool(true));
    assert_eq!(v["kind"], "certificate");
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(!t["iterations"].as_array().unwrap().is_empty());
    let o = run(&["verify", s(&cert), s(&data("counterexample.json"))]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict: ok"));
}

#[test]
fn plain_certificate_reports_quarter_values() {
    let o = run(&["solve", "--algorithm", "wgmv", s(&data("counterexample.json"))]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["half_integral"], Value::Bool(false));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("\"1/4\"") && text.contains("\"3/4\""));
}

#[test]
fn gw_on_augmentation_is_a_flavor_error() {
    let o = run(&["solve", "--algorithm", "gw", s(&data("counterexample.json"))]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).starts_with("error[flavor]:"));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn malformed_input_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"format_version\": 1").unwrap();
    let o = run(&["solve", "--algorithm", "wgmv", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error[parse]:"));
    let o = run(&["solve", "--algorithm", "wgmv", s(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn edited_dual_value_fails_half_integrality() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    run(&["solve", "--algorithm", "wgmv-half", s(&data("counterexample.json")), "-o", s(&cert)]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    v["duals"][0]["value"] = Value::from("1/4");
    std::fs::write(&cert, v.to_string()).unwrap();
    let o = run(&["verify", s(&cert), s(&data("counterexample.json"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("clause half-integral: FAIL"));
}

#[test]
fn mismatched_instance_fails_feasibility() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    let cert = dir.path().join("c.json");
    assert_eq!(code(&run(&["gen", "ecap", "--seed", "4", "--size", "5", "-o", s(&inst)])), 0);
    let other = dir.path().join("o.json");
    run(&["gen", "ecap", "--seed", "5", "--size", "5", "-o", s(&other)]);
    run(&["solve", "--algorithm", "wgmv-half", s(&inst), "-o", s(&cert)]);
    let o = run(&["verify", s(&cert), s(&other)]);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("clause feasible: FAIL") || out.contains("clause requirement: FAIL"), "{out}");
}

#[test]
fn gen_is_deterministic() {
    for kind in ["ecap", "proper", "seymour"] {
        let a = run(&["gen", kind, "--seed", "1"]);
        let b = run(&["gen", kind, "--seed", "1"]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
        assert_ne!(a.stdout, run(&["gen", kind, "--seed", "2"]).stdout);
    }
}

#[test]
fn seymour_pipeline_writes_all_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["seymour", s(&data("gap_instance.json")), s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let gap: Value = serde_json::from_str(&std::fs::read_to_string(out.join("gap_report.json")).unwrap()).unwrap();
    assert_eq!(gap["multicut_value"], 4);
    assert_eq!(gap["flow_value"], "5/2");
    assert_eq!(gap["ratio"], "8/5");
    let checks = [("flow.json", "gap_instance.json"), ("multicut.json", "gap_instance.json")];
    for (doc, inst) in checks {
        assert_eq!(code(&run(&["verify", s(&out.join(doc)), s(&data(inst))])), 0, "{doc}");
    }
    assert_eq!(code(&run(&["verify", s(&out.join("certificate.json")), s(&out.join("dual_instance.json"))])), 0);
}

#[test]
fn parallel_pair_has_no_gap() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("pair.json");
    let text = r#"{"format_version": 1, "kind": "instance", "vertex_count": 2,
        "edges": [[0, 0, 1, 3, "supply"], [1, 0, 1, 0, "demand"]],
        "rotation": [[0, 1], [1, 0]]}"#;
    std::fs::write(&inst, text).unwrap();
    let out = dir.path().join("out");
    let o = run(&["seymour", s(&inst), s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let gap: Value = serde_json::from_str(&std::fs::read_to_string(out.join("gap_report.json")).unwrap()).unwrap();
    assert_eq!(gap["multicut_value"], 3);
    assert_eq!(gap["flow_value"], "3/1");
}

#[test]
fn broken_rotation_is_an_embedding_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k4.json");
    // K4 with a rotation that does not embed on the sphere
    let text = r#"{"format_version": 1, "kind": "instance", "vertex_count": 4,
        "edges": [[0, 0, 1, 1, "supply"], [1, 0, 2, 1, "supply"], [2, 0, 3, 1, "supply"],
                  [3, 1, 2, 1, "supply"], [4, 1, 3, 1, "supply"], [5, 2, 3, 0, "demand"]],
        "rotation": [[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]]}"#;
    std::fs::write(&inst, text).unwrap();
    let o = run(&["seymour", s(&inst), s(&dir.path().join("out"))]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error[embedding]:"));
}

#[test]
fn flow_overload_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    run(&["seymour", s(&data("gap_instance.json")), s(&out)]);
    let path = out.join("flow.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let paths = v["paths"].as_array_mut().unwrap();
    let dup = paths.iter().max_by_key(|p| p["edges"].as_array().unwrap().len()).unwrap().clone();
    for _ in 0..8 {
        paths.push(dup.clone());
    }
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(&["verify", s(&path), s(&data("gap_instance.json"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("clause capacity: FAIL"));
}

#[test]
fn harness_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = run(&["harness", "--seed", "1", "--count", "100", "-o", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 1);
    assert!(v["properties"].as_array().unwrap().iter().all(|p| p["failures"] == 0));

    let o = run(&["harness", "--seed", "1", "--count", "30", "--fault", "skip-reductions", "-o", s(&report)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("FAIL property wgmv-half.half-integral"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let prop = v["properties"].as_array().unwrap().iter().find(|p| p["name"] == "wgmv-half.half-integral").unwrap();
    let witness = prop["witnesses"][0]["path"].as_str().unwrap();
    let o = run(&["solve", "--algorithm", "wgmv", witness]);
    assert_eq!(code(&o), 0);
}
