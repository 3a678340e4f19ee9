use std::path::PathBuf;
use std::process::{Command, Output};

fn wfock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfock")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wfock-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn h2_bracket() {
    let o = wfock(&["h2", "bracket", "V(1,2)", "V(0,1)"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-1*V(0,2)");
}

#[test]
fn unknown_instance_is_usage_error() {
    let o = wfock(&["check-relations", "--instance", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn zero_jobs_rejected() {
    let o = wfock(&["h2", "verify", "--jobs", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_relations_text() {
    let o = wfock(&["check-relations", "--instance", "p2", "--relation", "Q0", "--max-degree", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().last().unwrap().contains("0 failed"), "{out}");
}

#[test]
fn report_json_schema() {
    let o = wfock(&[
        "check-relations",
        "--instance",
        "curve:g=1,e=1",
        "--relation",
        "Q1",
        "--max-degree",
        "4",
        "--max-index",
        "1",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["suite", "instance", "cases", "summary"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let cases = v["cases"].as_array().unwrap();
    assert!(!cases.is_empty());
    for c in cases {
        assert!(c["id"].is_string() && c["detail"].is_string());
        assert!(["OK", "FAIL", "SKIP"].contains(&c["status"].as_str().unwrap()));
    }
}

#[test]
fn jobs_do_not_change_report() {
    let run = |jobs: &str| {
        stdout(&wfock(&[
            "check-relations",
            "--instance",
            "p2",
            "--relation",
            "all",
            "--max-degree",
            "4",
            "--max-index",
            "1",
            "--format",
            "json",
            "--jobs",
            jobs,
        ]))
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn degenerate_sl2_json() {
    let o = wfock(&[
        "degenerate",
        "--instance",
        "curve:g=0,e=1",
        "--r",
        "1",
        "--window",
        "4",
        "--suite",
        "sl2",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["h_spectrum"].is_array());
}

#[test]
fn lefschetz_files() {
    let m = tmp("n.json");
    std::fs::write(&m, r#"{"dim":3,"entries":[["0","1","0"],["0","0","1"],["0","0","0"]]}"#).unwrap();
    let s = tmp("s.json");
    let lit = tmp("lit.json");
    let (m, s, lit) = (m.to_str().unwrap(), s.to_str().unwrap(), lit.to_str().unwrap());

    let o = wfock(&["lefschetz", "weight-filtration", "--matrix", m, "--out", s]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Gr dimensions -2:1 0:1 2:1"));
    assert!(wfock(&["lefschetz", "verify", "--space", s]).status.success());

    assert!(wfock(&["lefschetz", "weight-filtration", "--matrix", m, "--out", lit, "--literal"]).status.success());
    assert_eq!(wfock(&["lefschetz", "verify", "--space", lit]).status.code(), Some(1));
}

#[test]
fn malformed_matrix() {
    let m = tmp("bad.json");
    std::fs::write(&m, "[[0,1],[0,0]]").unwrap();
    let o = wfock(&["lefschetz", "weight-filtration", "--matrix", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
