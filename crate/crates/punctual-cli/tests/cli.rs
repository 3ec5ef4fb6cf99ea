use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn punctual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_punctual"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("punctual-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
        .unwrap_or_else(|| panic!("no {key} in `{line}`"))
}

#[test]
fn compare_reports_verdict_and_witness() {
    let out = punctual(&["levitz", "cmp", "x*x", "2^x"]);
    assert!(out.status.success());
    let line = stdout(&out);
    assert_eq!(field(&line, "verdict"), "Less");
    let w: u64 = field(&line, "witness").parse().unwrap();
    assert!(w > 0);
    let out = punctual(&["levitz", "cmp", "2^x", "2^x"]);
    assert_eq!(stdout(&out).trim(), "verdict=Equal");
}

#[test]
fn parse_errors_exit_one() {
    let out = punctual(&["levitz", "cmp", "x+", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error=levitz.parse"));
    assert_eq!(punctual(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        punctual(&["succ-a", "2", "--budget", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn gap_copy_successor_and_position() {
    let out = punctual(&["succ-a", "2", "--provider", "tower"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "result=23");
    let out = punctual(&["pos-a", "4"]);
    assert_eq!(stdout(&out).trim(), "block=1 offset=0");
    let out = punctual(&["chain-a", "3"]);
    assert_eq!(field(&stdout(&out), "chain"), "2,23,0");
    let out = punctual(&["succ-a", "5", "--provider", "ecliptic"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn doubled_copy_over_identity_starts_at_zero() {
    let out = punctual(&["chain-d", "2"]);
    assert!(out.status.success());
    assert!(field(&stdout(&out), "chain").starts_with("0,"));
}

#[test]
fn lift_over_identity_is_ordinary_arithmetic() {
    assert_eq!(
        stdout(&punctual(&["lift", "plus", "19", "23"])).trim(),
        "result=42"
    );
    assert_eq!(
        stdout(&punctual(&["lift", "times", "6", "7"])).trim(),
        "result=42"
    );
    assert_eq!(
        stdout(&punctual(&["lift", "succ", "41"])).trim(),
        "result=42"
    );
    assert_eq!(
        stdout(&punctual(&["lift", "pow2", "5"])).trim(),
        "result=32"
    );
    assert_eq!(punctual(&["lift", "plus", "1"]).status.code(), Some(1));
}

#[test]
fn normal_forms_and_codes() {
    let a = stdout(&punctual(&["levitz", "anf", "(x+1)*(x+1)"]));
    let b = stdout(&punctual(&["levitz", "anf", "x*x+x+x+1"]));
    assert_eq!(a, b);
    let out = punctual(&["levitz", "encode", "x"]);
    assert!(field(&stdout(&out), "code").parse::<u64>().is_ok());
}

#[test]
fn island_run_satisfies_every_opponent() {
    let opp = scratch("linear.txt", "a=5 value=x-1\na=7 b=2 value=0\n");
    let trace = opp.with_file_name("linear.trace");
    let out = punctual(&[
        "island",
        "run",
        "--primes",
        "2,3",
        "--opponents",
        opp.to_str().unwrap(),
        "--stages",
        "40",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(field(text.lines().next().unwrap(), "satisfied"), "2/2");
    let transcript = fs::read_to_string(&trace).unwrap();
    assert!(transcript.lines().all(|l| l.starts_with("stage=")));
    assert!(transcript.contains("event=satisfy"));
}

#[test]
fn island_rejects_smooth_coefficients() {
    let opp = scratch("smooth.txt", "a=6 value=x\n");
    let out = punctual(&[
        "island",
        "run",
        "--opponents",
        opp.to_str().unwrap(),
        "--stages",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error=island.input"));
}

#[test]
fn meta_run_checks_images() {
    let opp = scratch("meta.txt", "value=x-1\nvalue=x-1\n");
    let out = punctual(&[
        "meta",
        "run",
        "--family",
        "poly",
        "--opponents",
        opp.to_str().unwrap(),
        "--stages",
        "30",
        "--prefix",
        "x+1;x+2",
        "--check-images",
        "40",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(field(text.lines().next().unwrap(), "satisfied"), "2/2");
    assert_eq!(field(text.lines().last().unwrap(), "mismatches"), "0");
}

#[test]
fn cycles_report_and_table() {
    let out = punctual(&["cycles", "--lengths", "even", "--bound", "6", "--table"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(text.lines().next().unwrap(), "passed"), "true");
    assert!(text.contains("x=0 s_k=2 c_k=1"));
    assert_eq!(
        punctual(&["cycles", "--lengths", "012"]).status.code(),
        Some(1)
    );
}
