//! End-to-end checks of the purlc binary: exit codes, output files, and
//! the diagnostic stream format.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../purl/tests/corpus").join(format!("{name}.purl"))
}

fn purlc(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_purlc"));
    for arg in args {
        cmd.arg(arg.as_ref());
    }
    cmd.output().unwrap()
}

#[test]
fn clean_pattern_exits_zero_and_writes_html() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("market_bag.html");
    let output = purlc(&[&corpus("market_bag"), &"-o", &out]);
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let html = std::fs::read_to_string(&out).unwrap();
    assert!(html.starts_with("<!DOCTYPE html>"));
    assert!(html.contains("<div class=\"pattern\">"));
    assert!(html.contains("(12 sts)"));
}

#[test]
fn errors_exit_one_with_all_three_severities_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("errors.html");
    let output = purlc(&[&corpus("errors"), &"-o", &out]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.lines().any(|l| l.starts_with("warning: ")), "{stderr}");
    assert!(stderr.lines().any(|l| l.starts_with("error: ")), "{stderr}");
    assert!(stderr.lines().any(|l| l.starts_with("verification: ")), "{stderr}");
    assert!(stderr.contains("19 sts worked over 20 sts."), "{stderr}");
    // Output is still written so the marked-up pattern can be inspected.
    assert!(out.exists());
}

#[test]
fn missing_input_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.purl");
    let out = dir.path().join("nope.html");
    let output = purlc(&[&missing, &"-o", &out]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists(), "no output file may be written on exit 2");
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no/such/dir/out.html");
    let output = purlc(&[&corpus("market_bag"), &"-o", &out]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn strict_turns_warnings_into_failure() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("warned.purl");
    std::fs::write(&src, "pattern Shawl: CO 1. row : K. BO 1.").unwrap();
    let out = dir.path().join("warned.html");
    let relaxed = purlc(&[&src, &"-o", &out]);
    assert_eq!(relaxed.status.code(), Some(0));
    let strict = purlc(&[&src, &"-o", &out, &"--strict"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn text_format_writes_txt_with_default_name() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("one.purl");
    std::fs::write(&src, "pattern \"One Row\": CO 1. row : K. BO 1.").unwrap();
    let output = purlc(&[&src, &"--format", &"text"]);
    assert_eq!(output.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("one.txt")).unwrap();
    assert_eq!(text, "One Row\nCast-on 1 sts.\nRow 1 (RS): K. (1 sts)\nBind-off  1 sts.\n");
}

#[test]
fn ast_json_dump_prints_all_three_passes() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("s.purl");
    std::fs::write(&src, "sample s: row : K. pattern \"X\": CO 1. s. BO 1.").unwrap();
    let out = dir.path().join("s.html");
    let output = purlc(&[&src, &"-o", &out, &"--emit-ast-json"]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    for label in ["PASS 1:", "PASS 2:", "PASS 3:"] {
        assert!(stdout.contains(label), "{stdout}");
    }
    // The sample call is present after pass 1 and gone after pass 2.
    let pass2 = stdout.split("PASS 2:").nth(1).unwrap();
    assert!(!pass2.contains("SampleCall"), "pass 2 must splice calls away");
}

#[test]
fn empty_input_warns_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("empty.purl");
    std::fs::write(&src, "").unwrap();
    let output = purlc(&[&src]);
    assert_eq!(output.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert_eq!(stderr, "warning: No pattern to compile :(\n");
}

#[test]
fn diagnostic_stream_is_deterministic() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("e.html");
        let output = purlc(&[&corpus("errors"), &"-o", &out]);
        (output.status.code(), output.stderr)
    };
    assert_eq!(run(), run());
}

#[test]
fn default_output_replaces_extension() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("name.purl");
    std::fs::write(&src, "pattern \"N\": CO 1. row : K. BO 1.").unwrap();
    let output = purlc(&[&src]);
    assert_eq!(output.status.code(), Some(0));
    assert!(Path::new(&dir.path().join("name.html")).exists());
}
