use std::process::{Command, Output};

use serde_json::Value;

fn zf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeta-floor")).args(args).output().expect("spawn zeta-floor")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn verify_reports_holds() {
    let out = zf(&["verify", "--s", "1/2", "--n", "2", "--no-header"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["verdict"], "Holds");
    assert_eq!(v["result"]["rhs_floor"], -3);
    assert_eq!(v["result"]["lhs_floor"], -3);
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim(), "Holds, lhs=-3, rhs=-3");
}

#[test]
fn precision_cap_gives_undecided_exit() {
    // 4 bits cannot pin 1/T(10^6) to one integer
    let out = zf(&["verify", "--s", "1/2", "--n", "1000000", "--max-bits", "4", "--no-header"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["result"]["verdict"], "Undecided");
}

#[test]
fn usage_errors_exit_three() {
    for args in [
        &["verify", "--s", "3/2", "--n", "1"][..],
        &["verify", "--n", "1"],
        &["verify", "--s", "1/2", "--n", "0"],
        &["tail", "--s", "1/2", "--n", "3", "--kind", "a"],
        &["curve", "--p", "5,7"],
        &["bogus"],
        &[],
    ] {
        let out = zf(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn no_header_output_is_deterministic() {
    let args = ["scan", "--s", "2/7", "--n-max", "300", "--no-header", "--jobs", "3"];
    let a = zf(&args);
    let b = zf(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["result"]["empirical_N"], 1);
    assert_eq!(v["result"]["holds"], 300);
    assert!(v.get("generated_unix").is_none());
}

#[test]
fn header_is_one_line_in_csv() {
    let with = zf(&["scan", "--s", "1/3", "--n-max", "20", "--format", "csv"]);
    let without = zf(&["scan", "--s", "1/3", "--n-max", "20", "--format", "csv", "--no-header"]);
    let with = String::from_utf8(with.stdout).unwrap();
    let without = String::from_utf8(without.stdout).unwrap();
    let (first, rest) = with.split_once('\n').unwrap();
    assert!(first.starts_with("# zeta-floor"));
    assert_eq!(rest, without);
    let mut lines = without.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next().unwrap(), "n,lhs_floor,rhs_floor,verdict,precision_used");
    assert_eq!(lines.count(), 20);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "verify", "s": "1/5", "n": 7, "no_header": true}"#).unwrap();
    let out_path = dir.path().join("out.json");
    let out = zf(&["--config", cfg.to_str().unwrap(), "--n", "8", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["config"]["n"], 8);
    assert_eq!(v["config"]["s"], "1/5");
    assert_eq!(v["result"]["n"], 8);
    assert_eq!(v["result"]["verdict"], "Holds");

    std::fs::write(&cfg, r#"{"command": "verify", "unknown_field": 1}"#).unwrap();
    assert_eq!(zf(&["--config", cfg.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn tail_enclosure_matches_reference() {
    let out = zf(&["tail", "--s", "1/5", "--n", "3", "--kind", "b", "--no-header"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    let mid = r["midpoint"].as_f64().unwrap();
    assert!((mid + 0.414_460_187_566_426_99).abs() < 1e-15);
    assert!(r["radius"].as_f64().unwrap() <= 9.094947017729282e-13);
    assert!(r["lower"].as_f64().unwrap() <= mid && mid <= r["upper"].as_f64().unwrap());
}

#[test]
fn curve_exceptions_and_certify() {
    let out = zf(&["curve", "--p", "5", "--m", "1", "--y-bound", "500", "--no-header"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["mirror_closed"], true);
    assert_eq!(v["result"]["eq4_holds"], true);

    let out = zf(&["exceptions", "--p", "5,7", "--n-max", "2000", "--no-header"]);
    assert_eq!(out.status.code(), Some(0));
    let per_p = json(&out)["result"]["per_p"].as_array().unwrap().clone();
    assert_eq!(per_p.len(), 2);
    assert!(per_p.iter().all(|e| e["phi_injection"] == true));

    let out = zf(&["certify", "--p", "5", "--format", "csv", "--no-header"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("alpha_degree,computed,expected,matches"));
    assert!(text.contains("19,-8;-24;0;32,-8;-24;0;32,true"));
    assert_eq!(zf(&["certify", "--p", "3"]).status.code(), Some(3));
}
