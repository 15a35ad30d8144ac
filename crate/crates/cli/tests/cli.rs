use std::path::Path;
use std::process::{Command, Output};

fn vodcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vodcap"))
        .args(args)
        .output()
        .unwrap()
}

fn bundled_source(name: &str) -> String {
    let out = vodcap(&["scenarios", "--show", name]);
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

fn replace_line(src: &str, key: &str, line: &str) -> String {
    src.lines()
        .map(|l| if l.starts_with(key) { line } else { l })
        .collect::<Vec<_>>()
        .join("\n")
}

fn plan_file(dir: &Path, toml: &str) -> Output {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, toml).unwrap();
    vodcap(&["plan", "--scenario", path.to_str().unwrap()])
}

#[test]
fn lists_bundled_scenarios() {
    let out = vodcap(&["scenarios"]);
    let names = String::from_utf8(out.stdout).unwrap();
    for n in [
        "table1-sd",
        "table1-hd",
        "sec4-centralized",
        "sec4-distributed",
    ] {
        assert!(names.lines().any(|l| l == n), "{n}");
    }
}

#[test]
fn plan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("plan.csv");
    let out = vodcap(&[
        "plan",
        "--builtin",
        "table1-sd",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(out_path).unwrap();
    assert!(csv.starts_with("point,cluster.interactive_rate,service,r,"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn report_format() {
    let out = vodcap(&[
        "plan",
        "--builtin",
        "sec4-distributed",
        "--format",
        "report",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("== scenario ==") && text.contains("S_CL="));
}

#[test]
fn parse_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = plan_file(dir.path(), "name = \"x\"\n[cluster\n");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validation_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let src = replace_line(
        &bundled_source("sec4-centralized"),
        "multicast_factor",
        "multicast_factor = 0",
    );
    let out = plan_file(dir.path(), &src);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("multicast_factor"));
}

#[test]
fn unit_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let src = replace_line(
        &bundled_source("table1-sd"),
        "peak_period",
        "peak_period = 7",
    );
    let out = plan_file(dir.path(), &src);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("peak_period"));
}

#[test]
fn infeasible_exit_code_still_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let src = replace_line(
        &bundled_source("table1-sd"),
        "households",
        "households = 900000000",
    );
    let src = replace_line(&src, "blocking_target", "blocking_target = 1e-12");
    let out = plan_file(dir.path(), &src);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("infeasible:"));
}

#[test]
fn missing_file_exit_code() {
    let out = vodcap(&["plan", "--scenario", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(7));
}

#[test]
fn usage_error_exit_code() {
    assert_eq!(vodcap(&["plan"]).status.code(), Some(2));
    assert_eq!(
        vodcap(&["plan", "--builtin", "x", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_changes_simulated_columns_only() {
    let run = |seed: &str| {
        let out = vodcap(&["simulate", "--builtin", "table1-sd", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap()
    };
    let (a, b) = (run("1"), run("2"));
    assert_ne!(a, b);
    let head = |s: &str| {
        s.lines()
            .map(|l| l.split(',').take(11).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
    };
    assert_eq!(head(&a), head(&b));
}

#[test]
fn validate_suite_passes() {
    let out = vodcap(&["validate", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("[FAIL]"));
    assert!(text.contains("alpha="));
}
