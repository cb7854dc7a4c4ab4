use std::path::Path;
use std::process::{Command, Output};

fn leadnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leadnet")).args(args).output().unwrap()
}

fn simulated(dir: &Path) -> (String, String) {
    let out = dir.join("data");
    let status = leadnet(&["simulate", "--out", out.to_str().unwrap(), "--matches", "30", "--seed", "2"]);
    assert!(status.status.success());
    (
        out.join("corpus.jsonl").to_str().unwrap().to_string(),
        out.join("stats.csv").to_str().unwrap().to_string(),
    )
}

#[test]
fn usage_errors_exit_with_config_code() {
    assert_eq!(leadnet(&["replicate", "--seed", "x"]).status.code(), Some(3));
    assert_eq!(leadnet(&["bogus"]).status.code(), Some(3));
    assert_eq!(leadnet(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_and_malformed_inputs_are_data_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.jsonl");
    assert_eq!(leadnet(&["ingest", "--corpus", missing.to_str().unwrap()]).status.code(), Some(1));
    let bad = tmp.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"v\":1,\"nonsense\":true}\n").unwrap();
    assert_eq!(leadnet(&["ingest", "--corpus", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn bad_study_configuration_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let (corpus, stats) = simulated(tmp.path());
    let out = tmp.path().join("r");
    let args = ["replicate", "--corpus", &corpus, "--stats", &stats, "--bootstrap", "10"];
    let o = leadnet(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(leadnet(&["analyze", "--corpus", &corpus, "--match", "no-such"]).status.code(), Some(3));
}

#[test]
fn ingest_network_and_analyze_succeed() {
    let tmp = tempfile::tempdir().unwrap();
    let (corpus, stats) = simulated(tmp.path());
    let o = leadnet(&["ingest", "--corpus", &corpus, "--stats", &stats]);
    assert!(o.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["matches"], 30);

    let canonical = tmp.path().join("canon.jsonl");
    assert!(leadnet(&["ingest", "--corpus", &corpus, "--canonical", canonical.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read(&canonical).unwrap(), std::fs::read(&corpus).unwrap());

    for export in ["json", "dot", "graphml"] {
        let o = leadnet(&["network", "--corpus", &corpus, "--match", "sim-00001", "--export", export]);
        assert!(o.status.success(), "{export}");
        assert!(!o.stdout.is_empty());
    }
    let o = leadnet(&["analyze", "--corpus", &corpus, "--match", "sim-00001"]);
    assert!(o.status.success());
    let a: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(a["teams"].as_array().unwrap().len(), 2);
}
