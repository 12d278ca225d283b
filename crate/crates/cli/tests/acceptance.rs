//! Acceptance: command-line outputs are byte-identical to the checked-in
//! goldens across two consecutive runs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn golden(name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn dg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_golden(args: &[&str], golden_name: &str, expected_exit: i32) {
    let first = dg(args);
    let second = dg(args);
    assert_eq!(
        first.stdout, second.stdout,
        "two consecutive runs differ for {args:?}"
    );
    assert_eq!(
        first.stdout,
        golden(golden_name),
        "output of {args:?} does not match {golden_name}"
    );
    assert_eq!(
        first.status.code(),
        Some(expected_exit),
        "exit for {args:?}"
    );
}

#[test]
fn criterion_7_byte_stable_golden_outputs() {
    let trivial = fixture("trivial.dg");
    let dnv = fixture("dnv.dg");
    let sentences = fixture("sentences.txt");
    let covered = fixture("covered_root.json");

    assert_golden(
        &["cfg", "-g", trivial.to_str().unwrap()],
        "cfg_trivial.golden",
        0,
    );
    assert_golden(
        &[
            "parse",
            "-g",
            dnv.to_str().unwrap(),
            "-i",
            sentences.to_str().unwrap(),
            "--emit",
            "ds",
            "--format",
            "conll",
        ],
        "parse_dnv_conll.golden",
        0,
    );
    assert_golden(
        &["validate", "-i", covered.to_str().unwrap()],
        "validate_covered_root.golden",
        1,
    );
    assert_golden(
        &[
            "parse",
            "-g",
            dnv.to_str().unwrap(),
            "-i",
            sentences.to_str().unwrap(),
            "--emit",
            "ds,pm,sem",
        ],
        "parse_dnv_json.golden",
        0,
    );

    println!("criterion 7 (byte-stable golden outputs, 4 commands, 2 runs each): PASS");
}
