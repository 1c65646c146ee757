use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gauge_triple::corpus;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gauge-triple"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], input: &Path) -> Output {
    let mut c = bin();
    c.arg(args[0]).arg(input).args(&args[1..]);
    c.output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(bin().arg("--version").output().unwrap().status.code(), Some(0));
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.json", &corpus::cycle(1));
    assert_eq!(run(&["analyze", "--bogus"], &f).status.code(), Some(64));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(64));
}

#[test]
fn level_zero_and_small_window_rejected() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.json", &corpus::cycle(1));
    assert_eq!(run(&["conditions", "--level", "0"], &f).status.code(), Some(64));
    let out = run(&["spectral", "--window", "50"], &f);
    assert_eq!(out.status.code(), Some(64));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_input_exits_66() {
    let out = bin().args(["trace", "/nonexistent/graph.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(66));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn malformed_input_exits_65() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"k\": 1, \"vertices\": [\"v\"], \"edges\": [{\"id\": \"e\", \"source\": \"v\", \"range\": \"w\"}]}");
    assert_eq!(run(&["analyze"], &bad).status.code(), Some(65));
    let junk = write(&dir, "junk.json", "not json");
    assert_eq!(run(&["trace"], &junk).status.code(), Some(65));
}

#[test]
fn analyze_reports_ends_and_hypotheses() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "broom.json", &corpus::broom(2));
    let out = run(&["analyze"], &f);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["ends"].as_array().unwrap().len(), 2);
    assert_eq!(v["hypotheses"]["connected"], true);
}

#[test]
fn trace_of_dyadic_tree() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.json", &corpus::dyadic_tree(2));
    let v = json_of(&run(&["trace"], &f));
    assert_eq!(v["faithful"], true);
    assert_eq!(v["trace_condition"], true);
}

#[test]
fn ktheory_counts_ends_and_loops() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "cb.json", &corpus::cycle_and_broom(3, 2));
    let v = json_of(&run(&["ktheory"], &f));
    assert_eq!(v["k0"], 3);
    assert_eq!(v["k1"], 1);

    let rose = write(&dir, "rose.json", &corpus::rose(3));
    assert_eq!(run(&["ktheory"], &rose).status.code(), Some(65));
}

#[test]
fn hochschild_check_cycle_verdicts() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "t.json", &corpus::torus(2));
    let out = run(&["hochschild", "--check-cycle"], &good);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["closed"], true);

    let bad = write(&dir, "ef.json", &corpus::ef_ab());
    let out = run(&["hochschild", "--check-cycle"], &bad);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["closed"], false);
    assert!(v["failing_step"].is_number());
}

#[test]
fn clifford_signs_for_rank_two() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.json", &corpus::torus(2));
    let v = json_of(&run(&["clifford"], &f));
    assert_eq!(v["k"], 2);
    assert_eq!(v["span_dimension"], v["expected_span_dimension"]);
}

#[test]
fn spectral_csv_has_header_and_rows() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.json", &corpus::cycle(1));
    let out = run(&["spectral", "--vertex", "v0", "--window", "1000", "--csv"], &f);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,F"));
    assert!(lines.count() > 10);
}

#[test]
fn conditions_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "c.json", &corpus::cycle(1));
    let out = run(&["conditions"], &good);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["report_version"], 1);
    assert_eq!(v["conditions"].as_array().unwrap().len(), 9);

    let sink = write(&dir, "s.json", &corpus::path_to_sink(2));
    assert_eq!(run(&["conditions"], &sink).status.code(), Some(2));
}

#[test]
fn text_mode_for_every_subcommand() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.json", &corpus::cycle(1));
    for sub in ["analyze", "trace", "ktheory", "hochschild", "clifford", "spectral", "conditions"] {
        let out = run(&[sub, "--format", "text", "--window", "1000"], &f);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(!text.is_empty() && !text.trim_start().starts_with('{'), "{sub}");
    }
}

#[test]
fn out_file_matches_stdout_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "b.json", &corpus::broom(1));
    let target = dir.path().join("report.json");
    let a = run(&["conditions", "--out", target.to_str().unwrap()], &f);
    assert_eq!(a.status.code(), Some(0));
    assert!(a.stdout.is_empty());
    let b = run(&["conditions"], &f);
    assert_eq!(std::fs::read(&target).unwrap(), b.stdout);
}

#[test]
fn csv_rejected_outside_spectral() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.json", &corpus::cycle(1));
    assert_eq!(run(&["trace", "--format", "csv"], &f).status.code(), Some(64));
}
