//! End-to-end runs of the binary.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_workbench");

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match cache {
        Some(dir) => cmd.env("WORKBENCH_CACHE", dir),
        None => cmd.env_remove("WORKBENCH_CACHE"),
    };
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn symbols_are_cached_and_corruption_is_repaired() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["symbols", "--curve", "32a1", "--level", "32", "--sign", "+"];
    let first = run(&args, Some(dir.path()));
    assert_eq!(first.status.code(), Some(0));
    assert!(stderr(&first).contains("cache miss"));
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1, "exactly one entry and no temporary leftovers");

    let second = run(&args, Some(dir.path()));
    assert!(stderr(&second).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);

    std::fs::write(&entries[0], "{\"schema_version\": 1, \"truncated").unwrap();
    let third = run(&args, Some(dir.path()));
    assert_eq!(third.status.code(), Some(0));
    assert!(stderr(&third).contains("cache replaced"));
    assert_eq!(first.stdout, third.stdout);
    assert!(stderr(&run(&args, Some(dir.path()))).contains("cache hit"));
}

#[test]
fn input_errors_exit_with_two() {
    let mismatch = run(&["symbols", "--curve", "32a1", "--level", "64", "--sign", "+"], None);
    assert_eq!(mismatch.status.code(), Some(2));
    assert!(stderr(&mismatch).contains("conductor"));
    assert_eq!(run(&["symbols", "--curve", "nonsense", "--sign", "+"], None).status.code(), Some(2));
    assert_eq!(run(&["invariants", "--series", "{ not json"], None).status.code(), Some(2));
    assert_eq!(run(&["theta", "--curve", "32a1", "--twist", "-7", "--n-max", "1"], None).status.code(), Some(2));
    // p = 3 is not supersingular for 11a1
    assert_eq!(run(&["theta", "--curve", "11a1", "--n-max", "3"], None).status.code(), Some(2));
    // -43 is inert at 3
    let strict = run(&["theta", "--curve", "32a1", "--twist", "-43", "--n-max", "3", "--strict-paper-hypotheses"], None);
    assert_eq!(strict.status.code(), Some(2));
    let bad_version = r#"{"schema_version": 9, "p": 3, "precision": 20, "coefficients": [1]}"#;
    assert_eq!(run(&["invariants", "--series", bad_version], None).status.code(), Some(2));
}

#[test]
fn theta_reports_are_deterministic_and_parallel_safe() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["theta", "--curve", "32a1", "--twist", "-43", "--n-max", "5"];
    let a = run(&[&base[..], &["--jobs", "1"]].concat(), Some(dir.path()));
    let b = run(&[&base[..], &["--jobs", "4"]].concat(), Some(dir.path()));
    let c = run(&base, None);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v = json(&a);
    assert_eq!(v["series"].as_array().unwrap().len(), 2);
    assert_eq!(v["series"][0]["sign"], "Plus");
    assert!(v["series"][0]["reinterpolation_failures"].as_array().unwrap().is_empty());
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("inv.json");
    let out = run(&["invariants", "--series", &data("series_x2_minus_3.json"), "--output", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["profile"]["lambda"], 2);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn thin_wrappers() {
    let c2 = run(
        &["c2", "--f", &data("element_p_squared.json"), "--g", &data("element_t_minus_s.json"), "--prime", &data("prime_t_minus_s.json")],
        None,
    );
    assert_eq!(c2.status.code(), Some(0), "{}", stderr(&c2));
    assert_eq!(json(&c2)["length"], 2);

    let push = run(&["c2", "--f", &data("element_t_minus_s.json"), "--g", &data("element_mixed.json")], None);
    assert_eq!(push.status.code(), Some(0), "{}", stderr(&push));
    assert_eq!(json(&push)["kind"], "pushforward");

    let cop = run(&["coprime", "--f", &data("series_x2_minus_3.json"), "--g", &data("series_x3_minus_3.json")], None);
    let v = json(&cop);
    assert_eq!(v["certificate"]["verdict"], "Coprime");
    assert_eq!(v["certificate"]["method"], "SlopeDisjoint");

    let spec = run(&["specialize", "--element", &data("element_mixed.json")], None);
    assert_eq!(spec.status.code(), Some(0), "{}", stderr(&spec));
    assert_eq!(json(&spec)["kind"], "specialization");
}

#[test]
fn fudge_ledgers() {
    let out = run(&["fudge", "--curve", "32a1", "--field", "-43", "--p", "5", "--sigma", "2"], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["ledger"]["places"][0]["data"]["reduction"], "Additive");
    assert_eq!(v["ledger"]["outside_hypothesis"], false);

    let empty = json(&run(&["fudge", "--curve", "32a1", "--field", "-43", "--p", "5", "--sigma", "5"], None));
    assert!(empty["ledger"]["divisor"]["terms"].as_array().unwrap().is_empty());

    let at_three = json(&run(&["fudge", "--curve", "32a1", "--field", "-43", "--p", "3", "--sigma", "2"], None));
    assert_eq!(at_three["ledger"]["outside_hypothesis"], true);

    let eleven = run(
        &["fudge", "--curve", "11a1", "--field", "-4", "--p", "5", "--sigma", "11", "--frobenius", &data("frobenius_11a1.json")],
        None,
    );
    assert_eq!(eleven.status.code(), Some(0), "{}", stderr(&eleven));
    let terms = json(&eleven)["ledger"]["divisor"]["terms"].as_array().unwrap().len();
    assert_eq!(terms, 1);

    let from_file = run(&["fudge", "--curve", "32a1", "--field", "-43", "--p", "5", "--sigma-file", &data("sigma_example.json")], None);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    // 5 = p is dropped from Sigma
    assert_eq!(json(&from_file)["ledger"]["places"].as_array().unwrap().len(), 3);
}

#[test]
fn table_diff_fails_honestly_on_short_runs() {
    // with too few levels the profiles cannot match the fixture
    let out = run(&["table", "--rows", "32a1/-43", "--n-max", "4"], None);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["comparison"]["matches"], false);
}

#[test]
fn table_rows_fail_in_isolation() {
    let out = run(&["table", "--examples", &data("table1_rows.json"), "--rows", "32a1/-43,32a1/-107", "--n-max", "3", "--strict-paper-hypotheses"], None);
    assert_eq!(out.status.code(), Some(1));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["status"], "failed");
    assert_eq!(rows[0]["exit_code"], 2);
    assert_eq!(rows[1]["status"], "ok");
}
