//! End-to-end tests against the built binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn aff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("aff-cli-test-{name}"));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_prelude_prints_signatures() {
    let path = write_temp("prelude.aff", aff_core::corpus::PRELUDE);
    let out = aff(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("Plus : Nat -o Nat -o Nat"), "{text}");
    assert!(text.contains("Dup! : !a -o !a * !a"), "{text}");
}

#[test]
fn check_reports_contraction_with_exit_one() {
    let path = write_temp("contraction.aff", "def Bad : 1 = \\w. w (*) w\n");
    let out = aff(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("unbound variable `w`"), "{err}");
}

#[test]
fn check_empty_file_is_silent_success() {
    let path = write_temp("empty.aff", "");
    let out = aff(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
}

#[test]
fn check_missing_file_is_usage_error() {
    let out = aff(&["check", "/definitely/not/here.aff"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infer_identity() {
    let out = aff(&["infer", "-e", "\\x. x"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "a -o a");
}

#[test]
fn infer_global_uses_prelude() {
    let out = aff(&["infer", "-e", "Zero"]);
    assert_eq!(stdout(&out).trim(), "Nat");
}

#[test]
fn infer_keyword_form_alone_is_a_parse_error() {
    let out = aff(&["infer", "-e", "fst"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_decodes_numerals() {
    let out = aff(&[
        "eval",
        "-e",
        "Plus (Succ Zero) (Succ (Succ Zero))",
        "--nat",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn eval_takes_stream_prefixes() {
    let out = aff(&["eval", "-e", "!Zero", "--take", "2", "--nat"]);
    assert_eq!(stdout(&out).trim(), "[0, 0]");
}

#[test]
fn eval_rejects_ill_typed_input_before_running() {
    let out = aff(&["eval", "-e", "tt tt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("type error"), "{}", stderr(&out));
}

#[test]
fn eval_fuel_limit_is_reported() {
    let out = aff(&["eval", "-e", "Plus (Succ Zero) (Succ Zero)", "--nat", "--fuel", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("fuel"), "{}", stderr(&out));
}

#[test]
fn json_outputs_carry_the_schema_version() {
    let out = aff(&["infer", "-e", "tt", "--json"]);
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["schema"], 1);
    assert_eq!(value["ok"], true);
    assert_eq!(value["type"], "1");

    let out = aff(&["check", "/definitely/not/here.aff", "--json"]);
    assert_eq!(out.status.code(), Some(2));

    let path = write_temp("json-bad.aff", "def Bad : 0 = tt\n");
    let out = aff(&["check", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["schema"], 1);
    assert_eq!(value["ok"], false);
    assert_eq!(value["error"]["class"], "ConstMismatch");
}

#[test]
fn trace_names_the_rules() {
    let out = aff(&["infer", "-e", "\\x. x", "--trace"]);
    let text = stdout(&out);
    assert!(text.contains("LolliI"), "{text}");
    assert!(text.contains("Var"), "{text}");
}

#[test]
fn warn_unused_reports_dropped_binders() {
    let path = write_temp("unused.aff", "def Drop : a -o 1 = \\x. tt\n");
    let out = aff(&["check", path.to_str().unwrap(), "--warn-unused"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("unused variable `x`"), "{}", stderr(&out));
}

#[test]
fn repl_session() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_aff"))
        .arg("repl")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(
            b":t \\x. x\ntt\n:def Two : Nat = Succ (Succ Zero)\n:t Two\n:trace on\n:t tt\n:q\n",
        )
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("a -o a"), "{text}");
    assert!(text.contains("tt"), "{text}");
    assert!(text.contains("Two : Nat"), "{text}");
    assert!(text.contains("OneI"), "{text}");
}
