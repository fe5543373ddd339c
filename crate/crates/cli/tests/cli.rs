use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn arity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn arity_of_example_golden() {
    let out = arity(&["arity", &path("example_R.json")]);
    assert_eq!(out.status.code(), Some(0));
    let expected = "\
structure: example_R
arity: 2
  k   orbits   n  classes
  1        1   1        1
  2        4   1        2
  2        4   2        4
  3       16   1        5
  3       16   2       16
  4       64   1       15
  4       64   2       64
witness (n = 1): (a, b) in, (a, c) out
";
    assert_eq!(stdout(&out), expected);
}

#[test]
fn orbits_golden() {
    let out = arity(&["orbits", &path("pure3.json"), "-k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "k = 2: 2 orbits\n   0  size      3  (0, 0)\n   1  size      6  (0, 1)\n"
    );
}

#[test]
fn eval_prints_tuples_in_order() {
    let out = arity(&["eval", "-f", "exists z . R(x,y,z)", "-s", &path("example_R.json"), "--vars", "x,y"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert_eq!(lines[0], "(a, b)");
    assert_eq!(lines[11], "(d, c)");
    assert_eq!(lines[12], "12 tuples");
}

#[test]
fn json_envelope_fields() {
    let out = arity(&["--json", "arity", &path("pure4.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["arity"], 1);
    assert_eq!(v["command"][0], "--json");
    assert_eq!(v["elements"].as_array().unwrap().len(), 4);
    let digest = v["structure_digest"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
    assert!(v.get("timings").is_none());
    assert!(v["tool_version"].is_string());

    let timed = json(&arity(&["--json", "--timings", "arity", &path("pure4.json")]));
    assert!(timed["timings"]["total_ms"].is_number());
    assert_eq!(timed["command"], v["command"]);
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        vec!["--json", "arity", "EXAMPLE"],
        vec!["--json", "ba", "EXAMPLE", "-k", "3", "-n", "2"],
        vec!["--json", "aut", "EXAMPLE", "--all"],
        vec!["--json", "binarize", "EXAMPLE"],
        vec!["--json", "gen", "n-ball-order", "5", "4", "--report"],
    ] {
        let p = path("example_R.json");
        let args: Vec<&str> = args.iter().map(|a| if *a == "EXAMPLE" { p.as_str() } else { a }).collect();
        let a = arity(&args);
        let b = arity(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn digest_ignores_input_format() {
    let dir = tempfile::tempdir().unwrap();
    let dsl = dir.path().join("r.txt");
    let out = arity(&["gen", "example-r"]);
    let json_file = dir.path().join("r.json");
    std::fs::write(&json_file, &out.stdout).unwrap();
    let from_json = json(&arity(&["--json", "arity", json_file.to_str().unwrap()]));
    let saved = arity(&["gen", "example-r", "-o", dsl.to_str().unwrap()]);
    assert_eq!(saved.status.code(), Some(0));
    let from_dsl = json(&arity(&["--json", "arity", dsl.to_str().unwrap()]));
    assert_eq!(from_json["structure_digest"], from_dsl["structure_digest"]);
    assert_eq!(from_json["result"], from_dsl["result"]);
}

#[test]
fn arity_mismatch_is_an_input_error() {
    let out = arity(&["eval", "-f", "K3(x,y)", "-s", &path("c5.json"), "--vars", "x,y"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("K3"), "{err}");
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    assert_eq!(arity(&["arity", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(arity(&["orbits"]).status.code(), Some(2));
    assert_eq!(arity(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn oversized_structure_exits_three() {
    let out = arity(&["arity", &path("big.json")]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cap"), "{err}");
}

#[test]
fn verify_list_names_every_check() {
    let out = arity(&["verify-paper", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for i in 1..=11 {
        assert!(text.lines().any(|l| l.starts_with(&format!("C{i} "))), "C{i} missing");
    }
    let listed = json(&arity(&["--json", "verify", "--list"]));
    assert_eq!(listed["result"].as_array().unwrap().len(), 11);
}

#[test]
fn verify_passing_subset_exits_zero() {
    let out = arity(&["verify-paper", "--only", "C8,C9"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).ends_with("2/2 checks passed\n"));
}

#[test]
fn tampered_fixture_changes_the_verdict() {
    let baseline = json(&arity(&["--json", "verify-paper", "--only", "C1"]));
    assert_eq!(baseline["result"]["total"], 1);

    let dir = tempfile::tempdir().unwrap();
    let original = std::fs::read_to_string(fixture("example_R.json")).unwrap();
    let tampered = original.replacen("[\"a\", \"b\", \"c\"], ", "", 1);
    assert_ne!(tampered, original);
    std::fs::write(dir.path().join("example_R.json"), tampered).unwrap();

    let out = arity(&["--json", "verify-paper", "--only", "C1", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"]["passed"], 0);
    let details = |v: &Value| v["result"]["checks"][0]["details"].clone();
    assert_ne!(details(&v), details(&baseline));
    let first = details(&v)[0].as_str().unwrap().to_string();
    assert!(first.contains("|R| = 11"), "{first}");
}

#[test]
fn generated_structures_feed_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = dir.path().join("c3.json");
    let p2 = dir.path().join("p2.json");
    arity(&["gen", "cyclic-order", "3", "-o", c3.to_str().unwrap()]);
    arity(&["gen", "pure-set", "2", "-o", p2.to_str().unwrap()]);
    let composed = dir.path().join("c.json");
    let out = arity(&["compose", c3.to_str().unwrap(), p2.to_str().unwrap(), "-o", composed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&arity(&["--json", "edef-check", composed.to_str().unwrap(), "--fiber-size", "2"]));
    assert_eq!(v["result"]["e_definable"], true);
    let v = json(&arity(&["--json", "arity", composed.to_str().unwrap()]));
    assert_eq!(v["result"]["arity"], 2);

    let u = json(&arity(&["--json", "djunion", p2.to_str().unwrap(), c3.to_str().unwrap()]));
    assert_eq!(u["result"]["structure"]["universe"], 5);
}

#[test]
fn formula_arity_by_relation_and_formula() {
    let p = path("c5.json");
    let v = json(&arity(&["--json", "formula-arity", &p, "-r", "K3"]));
    assert_eq!(v["result"]["arity"], 2);
    let v = json(&arity(&["--json", "formula-arity", &p, "-f", "x = y", "--vars", "x,y"]));
    assert_eq!(v["result"]["arity"], 1);
}
