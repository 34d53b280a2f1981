mod common;

use std::path::Path;
use std::process::{Command, Output};

fn pubsolid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pubsolid")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn cfg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_accepts_a_clean_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::write_fixture(dir.path(), 2, "");
    let out = pubsolid(&["--config", cfg(&config), "validate"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_config_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = pubsolid(&["--config", cfg(&dir.path().join("absent.toml")), "validate"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_config_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::write_fixture(dir.path(), 2, "bogus_key = 1\n");
    let out = pubsolid(&["--config", cfg(&config), "validate"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn duplicate_paper_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::write_fixture(dir.path(), 2, "");
    let papers = dir.path().join("papers.jsonl");
    let text = std::fs::read_to_string(&papers).unwrap();
    let first = text.lines().next().unwrap().to_string();
    std::fs::write(&papers, format!("{text}{first}\n")).unwrap();
    let out = pubsolid(&["--config", cfg(&config), "run"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn report_needs_its_stage_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::write_fixture(dir.path(), 2, "");
    let out = pubsolid(&["--config", cfg(&config), "report", "--figure", "S18"]);
    assert_eq!(code(&out), 1);
    let out = pubsolid(&["--config", cfg(&config), "report", "--figure", "X1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn net_then_report_writes_the_figure_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::write_fixture(dir.path(), 2, "");
    let out = pubsolid(&["--config", cfg(&config), "--threads", "2", "net"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = pubsolid(&["--config", cfg(&config), "report", "--figure", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/figures/figure_3.csv").exists());
}
