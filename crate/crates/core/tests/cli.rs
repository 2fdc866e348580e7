//! Command-line behaviour: golden outputs and exit codes.
//!
//! Set `EXEGESIS_BLESS=1` to rewrite the golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn login() -> PathBuf {
    manifest().join("corpus/login.spec")
}

fn fixture(name: &str) -> PathBuf {
    manifest().join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exegesis"))
        .args(args)
        .env_remove("EXEGESIS_STATE_CAP")
        .output()
        .unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn golden(name: &str, out: &Output) {
    let path = manifest().join("tests/golden").join(name);
    let actual = String::from_utf8(out.stdout.clone()).unwrap();
    if std::env::var_os("EXEGESIS_BLESS").is_some() {
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; rerun with EXEGESIS_BLESS=1", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn check_login_text() {
    let out = run(&["check", path_arg(&login())]);
    assert_eq!(out.status.code(), Some(0));
    golden("check_login.txt", &out);
}

#[test]
fn check_login_json() {
    let out = run(&["check", path_arg(&login()), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    golden("check_login.json", &out);
}

#[test]
fn matrix_text_and_json() {
    let out = run(&["matrix", path_arg(&login()), "--triple", "login_matrix"]);
    assert_eq!(out.status.code(), Some(0));
    golden("matrix_login.txt", &out);
    let out = run(&[
        "matrix",
        path_arg(&login()),
        "--triple",
        "pi_wrong_success_buggy",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    golden("matrix_buggy.json", &out);
}

#[test]
fn kat_equation() {
    let out = run(&["kat", path_arg(&login()), "--equation", "kat_atc"]);
    assert_eq!(out.status.code(), Some(0));
    golden("kat_atc.txt", &out);
}

#[test]
fn laws_exhaustive_small() {
    let out = run(&["laws", "--exhaustive", "--max-size", "2"]);
    assert_eq!(out.status.code(), Some(0));
    golden("laws_2.txt", &out);
}

#[test]
fn injected_fault_is_caught() {
    let out = run(&[
        "laws",
        "--max-size",
        "2",
        "--inject-fault",
        "demonic-as-liberal",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let failing: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(" FAIL ") && !l.starts_with("summary"))
        .collect();
    assert_eq!(failing.len(), 1, "{text}");
    assert!(failing[0]
        .trim_start()
        .starts_with("demonic-implies-angelic"));
}

#[test]
fn expectation_mismatch_exits_one() {
    let out = run(&["check", path_arg(&fixture("mismatch.spec"))]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("MISMATCH"));
    assert!(text.ends_with("result: FAIL (1 checks, 1 failed)\n"));
}

fn assert_usage_error(args: &[&str], needle: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(2), "{args:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(needle), "{args:?}: {err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn semantic_and_parse_errors_exit_two() {
    assert_usage_error(&["check", path_arg(&fixture("unknown_var.spec"))], "line 5");
    assert_usage_error(
        &["check", path_arg(&fixture("unknown_name.spec"))],
        "unknown predicate `nowhere`",
    );
    assert_usage_error(&["check", path_arg(&fixture("syntax.spec"))], "line 7");
    assert_usage_error(
        &["check", path_arg(&fixture("large.spec"))],
        "EXEGESIS_STATE_CAP",
    );
    assert_usage_error(
        &["check", path_arg(&fixture("missing.spec"))],
        "missing.spec",
    );
    assert_usage_error(
        &["matrix", path_arg(&login()), "--triple", "nope"],
        "no check named `nope`",
    );
    assert_usage_error(
        &["kat", path_arg(&login()), "--equation", "login_matrix"],
        "not a kat check",
    );
    assert_usage_error(&["laws", "--max-size", "9"], "limited to 4 states");
    assert_usage_error(&["laws", "--exhaustive", "--random"], "cannot be used with");
    assert_usage_error(&["frobnicate"], "unrecognized subcommand");
}

#[test]
fn state_cap_can_be_raised() {
    let out = Command::new(env!("CARGO_BIN_EXE_exegesis"))
        .args(["check", path_arg(&fixture("large.spec"))])
        .env("EXEGESIS_STATE_CAP", "10000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "result: PASS (0 checks, 0 failed)\n"
    );
    let out = Command::new(env!("CARGO_BIN_EXE_exegesis"))
        .args(["check", path_arg(&login())])
        .env("EXEGESIS_STATE_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_laws_json_is_reproducible() {
    let args = [
        "laws",
        "--random",
        "--samples",
        "200",
        "--seed",
        "11",
        "--json",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["models_checked"], 200);
    assert_eq!(v["sizes"], serde_json::json!([6]));
    let other = run(&[
        "laws",
        "--random",
        "--samples",
        "200",
        "--seed",
        "12",
        "--json",
    ]);
    assert_ne!(a.stdout, other.stdout);
}
