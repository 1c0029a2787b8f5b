use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn kronstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kronstab"))
        .args(args)
        .output()
        .unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_kronstab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn stability_exit_codes() {
    let out = kronstab(&["stability", "--fixture", "remark-s3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "stable");

    let out = kronstab(&[
        "stability",
        "--fixture",
        "k3-counterexample",
        "--probabilistic",
        "--prime",
        "101",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["probabilistic"], true);
    assert_eq!(v["prime"], 101);

    // the (m+2)-column block with 4 zero columns in row 0 on (3, 4)
    let unstable = r#"{"n":3,"m":4,"matrix":[
        [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0],[1,0,0,0],[0,1,0,0]],
        [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1],[0,0,1,0],[0,0,0,1]]]}"#;
    let out = with_stdin(&["stability", "--input", "-", "--json"], unstable);
    assert_eq!(
        out.status.code(),
        Some(11),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["status"], "unstable");

    // m = 2: three columns in e_1 (x) V out of four is exactly half
    let semistable = r#"{"n":2,"m":2,"matrix":[
        [[0,0,0],[0,0,0],[1,0,0],[0,1,0]],
        [[1,0,0],[0,1,0],[0,0,1],[1,1,1]]]}"#;
    let out = with_stdin(&["stability", "--input", "-", "--json"], semistable);
    assert_eq!(
        out.status.code(),
        Some(10),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn input_errors_exit_2() {
    let out = with_stdin(&["stability", "--input", "-"], "{\"n\": 3,");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    assert_eq!(
        kronstab(&["stability", "--fixture", "no-such"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(kronstab(&["stability"]).status.code(), Some(2));
    assert_eq!(
        kronstab(&["stability", "--input", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(kronstab(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        kronstab(&["hoppe", "--fixture", "k3-counterexample"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fixture_command() {
    let out = kronstab(&["fixture", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 4);

    let v = json(&kronstab(&["fixture", "--emit", "remark-s3"]));
    assert_eq!(v["matrix"][0][2], serde_json::json!([1, 0, 0, 0]));
    assert_eq!(v["matrix"][1][4], serde_json::json!([0, 0, 0, 1]));

    let v = json(&kronstab(&["fixture", "--emit", "k3-counterexample"]));
    assert_eq!(
        (v["n"].as_u64(), v["m"].as_u64(), v["k"].as_u64()),
        (Some(2), Some(2), Some(3))
    );
    assert_eq!(
        kronstab(&["fixture", "--emit", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn emitted_fixture_reads_back() {
    let text = kronstab(&["fixture", "--emit", "boundary-3-3"]).stdout;
    let out = with_stdin(
        &["classify", "--input", "-", "--json"],
        &String::from_utf8(text).unwrap(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["git"]["ok"]["status"], "stable");
    assert_eq!(v["degeneracy"]["ok"]["codim"], 2);
    assert_eq!(v["hoppe"]["ok"]["all_zero"], true);
    assert_eq!(v["ext"]["ok"]["ext1"], 12);
}

#[test]
fn classify_reports_k3_failure_of_equivalence() {
    let out = kronstab(&["classify", "--fixture", "k3-counterexample", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(
        v["summary"],
        "stable map, non-mu-stable sheaf: the equivalence fails for k=3"
    );
    assert_eq!(v["mu"]["ok"]["status"], "torsion");
    assert!(v["ext"]["error"].is_string());
}

#[test]
fn census_output_and_determinism() {
    let dir = std::env::temp_dir().join(format!("kronstab-census-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.jsonl");
    let p = path.to_str().unwrap();
    let run = || {
        kronstab(&[
            "census", "--n", "3", "--m", "3", "--count", "12", "--seed", "9", "--out", p, "--json",
        ])
    };
    let first = run();
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stdout)
    );
    assert_eq!(json(&first)["count"], 12);
    assert_eq!(run().status.code(), Some(0));

    let lines: Vec<Value> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("timings_ms");
            v
        })
        .collect();
    assert_eq!(lines.len(), 24);
    assert_eq!(lines[..12], lines[12..]);
    for (i, l) in lines[..12].iter().enumerate() {
        assert_eq!(l["index"], i);
        assert_eq!(l["schema_version"], 1);
    }
    std::fs::remove_dir_all(&dir).unwrap();

    let out = kronstab(&["census", "--n", "3", "--m", "3", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let out = kronstab(&[
        "census",
        "--n",
        "3",
        "--m",
        "3",
        "--count",
        "1",
        "--out",
        "/nonexistent/dir/c.jsonl",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn human_output_is_readable() {
    let out = kronstab(&["degeneracy", "--fixture", "remark-s3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "dim_estimate: 1"), "{text}");
    assert!(text.lines().any(|l| l == "tau: 3"), "{text}");
}
