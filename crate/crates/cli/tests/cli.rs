use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slotsolve"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn equal_fixture_is_optimal() {
    let out = run(&[
        "equal",
        "--input",
        fixture("equal_three_jobs.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["objective"], 12);
    assert_eq!(doc["verified"], true);
    assert!(doc.get("oracle_agreement").is_none());
}

#[test]
fn infeasible_tallsmall_exits_two_with_certificate() {
    let out = run(&[
        "tallsmall",
        "--input",
        fixture("tallsmall_one_machine.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["status"], "infeasible");
    assert!(doc["certificate"]["weight"].as_i64().unwrap() < 0);
    assert!(doc.get("objective").is_none());
}

#[test]
fn malformed_json_exits_one() {
    let out = run(&["equal", "--json", "{\"machines\": 1,"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot parse"));
}

#[test]
fn invalid_instance_exits_one() {
    let out = run(&[
        "equal",
        "--json",
        r#"{"machines":1,"length":3,"jobs":[{"release":0,"deadline":2}]}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_format_version_rejected() {
    let out = run(&[
        "prefetch",
        "--json",
        r#"{"format":2,"cache_size":1,"fetch_duration":1,"requests":["a"]}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn no_verify_reports_unverified() {
    let out = run(&[
        "prefetch",
        "--no-verify",
        "--input",
        fixture("prefetch_abac.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verified"], false);
}

#[test]
fn oracle_check_agrees() {
    for (cmd, file) in [
        ("equal", "equal_three_jobs.json"),
        ("tallsmall", "tallsmall_two_machines.json"),
        ("tallsmall", "tallsmall_one_machine.json"),
        ("prefetch", "prefetch_aabb.json"),
    ] {
        let out = run(&[
            cmd,
            "--oracle-check",
            "--input",
            fixture(file).to_str().unwrap(),
        ]);
        assert_eq!(stdout_json(&out)["oracle_agreement"], true, "{file}");
    }
}

#[test]
fn reads_standard_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = bin()
        .arg("prefetch")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"cache_size":1,"fetch_duration":2,"requests":["a","a","b","b"]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(stdout_json(&out)["objective"], 2);
}

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "equal", "--seed", "11", "--jobs", "8"]);
    let b = run(&["gen", "equal", "--seed", "11", "--jobs", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gen_range_error_exits_one() {
    let out = run(&[
        "gen",
        "prefetch",
        "--seed",
        "1",
        "--cache",
        "9",
        "--alphabet",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generated_instances_verify() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, extra) in [
        ("equal", "--planted"),
        ("tallsmall", "--planted"),
        ("prefetch", "--fetch=3"),
    ] {
        for seed in 0..5 {
            let path = dir.path().join(format!("{kind}-{seed}.json"));
            let g = run(&[
                "gen",
                kind,
                "--seed",
                &seed.to_string(),
                extra,
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(g.status.code(), Some(0));
            let out = run(&[kind, "--input", path.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0), "{kind} seed {seed}");
            assert_eq!(stdout_json(&out)["verified"], true);
        }
    }
}

#[test]
fn batch_mode_writes_one_file_per_input() {
    let inputs = tempfile::tempdir().unwrap();
    let outputs = tempfile::tempdir().unwrap();
    for name in ["tallsmall_two_machines.json", "tallsmall_one_machine.json"] {
        fs::copy(fixture(name), inputs.path().join(name)).unwrap();
    }
    let out = run(&[
        "tallsmall",
        "--input",
        inputs.path().to_str().unwrap(),
        "--out",
        outputs.path().to_str().unwrap(),
    ]);
    // one infeasible instance
    assert_eq!(out.status.code(), Some(2));
    let summary = stdout_json(&out);
    assert_eq!(summary["files"].as_array().unwrap().len(), 2);
    for name in ["tallsmall_two_machines", "tallsmall_one_machine"] {
        let written =
            fs::read_to_string(outputs.path().join(format!("{name}.solution.json"))).unwrap();
        let golden = fs::read_to_string(fixture(&format!("{name}.solution.json"))).unwrap();
        assert_eq!(written, golden);
    }
}

#[test]
fn batch_mode_needs_out() {
    let out = run(&["equal", "--input", fixture("").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
