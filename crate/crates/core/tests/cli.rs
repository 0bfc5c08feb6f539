use std::io::Write;
use std::process::{Command, Output, Stdio};

fn ukc(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ukc"))
        .args(args)
        .stdin(if stdin.is_some() { Stdio::piped() } else { Stdio::null() })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn ukc");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    child.wait_with_output().expect("wait for ukc")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const E1: &str = r#"{
  "space": {"kind": "euclidean", "dim": 1},
  "points": [
    {"locations": [[0.0], [2.0]], "probs": [0.5, 0.5]},
    {"locations": [[1.0]], "probs": [1.0]}
  ]
}"#;

const LINE3: &str = r#"{
  "space": {"kind": "finite", "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]},
  "points": [
    {"locations": [0, 2], "probs": [0.5, 0.5]},
    {"locations": [1], "probs": [1.0]}
  ]
}"#;

#[test]
fn solve_reports_cost_and_bound() {
    let out = ukc(&["solve", "--k", "1"], Some(E1));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["ecost"], 1.0);
    assert_eq!(v["bound"], 6.0);
    assert_eq!(v["strategy"], "ED");
    assert_eq!(v["det_solver"], "gonzalez");
    assert_eq!(v["centers"], serde_json::json!([[1.0]]));

    let out = ukc(&["solve", "--strategy", "ep", "--det", "exact", "--version", "unrestricted"], Some(E1));
    assert!(out.status.success());
    assert_eq!(json(&out)["bound"], 3.0);

    let out = ukc(&["solve", "--version", "one-center"], Some(E1));
    assert!(out.status.success());
    assert_eq!(json(&out)["bound"], 2.0);
}

#[test]
fn solve_reads_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line.json");
    std::fs::write(&path, LINE3).unwrap();
    let out = ukc(&["solve", "--input", path.to_str().unwrap(), "--strategy", "oc", "--det", "exact"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["ecost"], 1.5);
    assert_eq!(v["bound"], 5.0);
}

#[test]
fn unsupported_combination_exits_3() {
    let out = ukc(&["solve", "--strategy", "ep"], Some(LINE3));
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("expected-point assignment requires Euclidean space"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_input_exits_2() {
    let out = ukc(&["solve"], Some("{\"space\": 1}"));
    assert_eq!(out.status.code(), Some(2));

    let bad_probs = E1.replace("[0.5, 0.5]", "[0.5, 0.6]");
    let out = ukc(&["solve"], Some(&bad_probs));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points[0]"));

    let out = ukc(&["gen", "--n", "0", "--z", "1", "--space", "euclidean"], None);
    assert_eq!(out.status.code(), Some(2));

    let out = ukc(&["solve", "--input", "/nonexistent/instance.json"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_feeds_solve() {
    let args = ["gen", "--n", "3", "--z", "2", "--space", "finite", "--m", "6", "--seed", "5"];
    let a = ukc(&args, None);
    let b = ukc(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = ukc(&["gen", "--n", "3", "--z", "2", "--space", "finite", "--m", "6", "--seed", "6"], None);
    assert_ne!(a.stdout, other.stdout);

    let text = String::from_utf8(a.stdout).unwrap();
    let out = ukc(&["solve", "--k", "2", "--strategy", "oc"], Some(&text));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["assignment"].as_array().unwrap().len(), 3);
    assert_eq!(v["bound"], 7.0);
}

#[test]
fn verify_passes_and_is_reproducible() {
    let args = ["verify", "--suite", "bounds", "--trials", "12", "--seed", "3", "--omit-timing"];
    let a = ukc(&args, None);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = ukc(&args, None);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["wall_time_ms"], 0);
    assert_eq!(v["instance_digest"].as_str().unwrap().len(), 64);
    let rows = v["ratios"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn verify_rejects_degenerate_config() {
    let out = ukc(&["verify", "--max-n", "0", "--trials", "1"], None);
    assert_eq!(out.status.code(), Some(2));
}
