//! End-to-end tests of the `detbell` binary: golden outputs, JSON schemas,
//! and the exit-code contract (0 success, 1 mismatch, 2 usage).

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detbell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("detbell-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fig1_file() -> PathBuf {
    let path = scratch("fig1.txt");
    std::fs::write(&path, "2 Z\n5 -2\n-1 3\n").unwrap();
    path
}

#[test]
fn eval_prints_the_exact_value() {
    let m = fig1_file();
    let out = run(&["eval", "--formula", "main", "--matrix-file", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "13");

    let out = run(&[
        "eval",
        "--formula",
        "leibniz",
        "--matrix-file",
        m.to_str().unwrap(),
        "--json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["value"], "13");
    assert_eq!(doc["domain"], "Z");
}

#[test]
fn eval_compare_agrees() {
    let m = fig1_file();
    let out = run(&["eval", "--compare", "--matrix-file", m.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["all_agree"], true);
    assert_eq!(doc["det"], "13");
    assert!(doc["formulas"].as_array().unwrap().len() >= 6);
}

#[test]
fn rational_matrices_round_trip_through_eval() {
    let path = scratch("rat.txt");
    std::fs::write(&path, "2 Q\n5/2 -1/3\n-1 3\n").unwrap();
    let out = run(&["eval", "--formula", "main", "--matrix-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "43/6"); // 15/2 - 1/3
}

#[test]
fn decompose_verify_round_trip_and_exit_codes() {
    let dec = scratch("det3.json");
    let out = run(&[
        "decompose",
        "--formula",
        "main",
        "-n",
        "3",
        "--domain",
        "Q",
        "-o",
        dec.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["verify", dec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "valid file verifies");

    // corrupt a coefficient: the expansion no longer matches
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dec).unwrap()).unwrap();
    doc["terms"][0]["coeff"] = serde_json::json!("7");
    let bad = scratch("det3-bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "invalid decomposition exits 1");

    let out = run(&["verify", "/nonexistent/missing.json"]);
    assert_eq!(out.status.code(), Some(2), "missing file is a usage error");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["eval"]).status.code(), Some(2));
    let m = fig1_file();
    // char2 needs characteristic 2, so over Z this is a usage error
    let out = run(&["eval", "--formula", "char2", "--matrix-file", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // and --help succeeds
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bounds_table() {
    let out = run(&["bounds", "-n", "4", "--q", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["lower"], "9");
    assert_eq!(doc["upper"], "12");
    assert_eq!(doc["exact"], "12");

    let out = run(&["bounds", "-n", "5", "--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["lower"], "11");
    assert_eq!(doc["upper"], "52");

    // q must be a prime power
    assert_eq!(run(&["bounds", "-n", "4", "--q", "6"]).status.code(), Some(2));
}

#[test]
fn counts_json() {
    let out = run(&["counts", "-n", "4", "--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4]["bell"], "15");
    assert_eq!(rows[4]["bell_nk"][1], "11");
}

#[test]
fn waring_reports_counts() {
    let out = run(&["waring", "-n", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["term_count"], 20);
    assert_eq!(doc["bound_power_times_bell"], "20");
    assert_eq!(doc["terms"].as_array().unwrap().len(), 20);
    // coefficient maps are keyed "i,j" with exact fraction strings
    let form = doc["terms"][0]["form"].as_object().unwrap();
    assert!(form.keys().all(|k| k.split_once(',').is_some()));
    assert_eq!(doc["terms"][0]["coeff"].as_str().unwrap(), "1/24");
}

#[test]
fn polytope_report_and_svg() {
    let m = fig1_file();
    let svg = scratch("tile.svg");
    let out = run(&[
        "polytope",
        "--matrix-file",
        m.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--samples",
        "20",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["vertices"], 6);
    assert_eq!(doc["edges"], 6);
    assert_eq!(doc["volume"], "13");
    assert_eq!(doc["volume_matches_det"], true);
    assert_eq!(doc["neighbours"]["count"], 6);
    assert_eq!(doc["coverage"]["points_covered"], 20);
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));

    // a non-admissible matrix is a usage error
    let bad = scratch("bad.txt");
    std::fs::write(&bad, "2 Z\n5 2\n-1 3\n").unwrap();
    let out = run(&["polytope", "--matrix-file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // mismatched -n is rejected
    let out = run(&["polytope", "-n", "3", "--matrix-file", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_with_certificate_round_trip() {
    let cert = scratch("r3.json");
    let out = run(&["search", "--r", "3", "--cert", cert.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["outcome"], "no_solution");
    assert_eq!(doc["r"], 3);

    let out = run(&["search", "--verify-cert", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "genuine certificate verifies");

    // tampering with a count is caught
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    doc["pruned"] = serde_json::json!(1);
    let bad = scratch("r3-bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out = run(&["search", "--verify-cert", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // r = 11 is gated off by default
    let out = run(&["search", "--r", "11"]);
    assert_eq!(out.status.code(), Some(2));

    // workers flag and env var both parse
    let out = Command::new(env!("CARGO_BIN_EXE_detbell"))
        .args(["search", "--r", "2", "--workers", "2"])
        .env("DETBELL_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
