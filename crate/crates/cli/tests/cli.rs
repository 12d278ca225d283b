//! Behavior tests for the command-line interface: exit codes, flag
//! handling, emission formats, and self-consistency of the pipelines.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn dg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn dg_stdin(args: &[&str], envs: &[(&str, &str)], stdin: &str) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dg"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const AMBIG: &str = "cat N V\nroot V\nleaf N\nrule V : * N:OBJ\nrule V : * N:OBJ N:OBJ2\nrule N : * N:MOD\nword v : V\nword a : N\nword b : N\n";

fn write_temp(name: &str, content: &str) -> String {
    let path = std::env::temp_dir().join(format!("dg-cli-test-{name}-{}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn no_parse_is_exit_one_with_empty_record() {
    let out = dg_stdin(&["parse", "-g", &fixture("dnv.dg")], &[], "dog the barks\n");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "[]\n");
}

#[test]
fn unknown_word_is_exit_two() {
    let out = dg_stdin(&["parse", "-g", &fixture("dnv.dg")], &[], "the cat barks\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown word `cat` at position 2"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn empty_input_is_silent_success() {
    let out = dg_stdin(&["parse", "-g", &fixture("dnv.dg")], &[], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
}

#[test]
fn truncation_record_in_json_output() {
    let g = write_temp("ambig.dg", AMBIG);
    let out = dg_stdin(&["parse", "-g", &g, "--max-analyses", "1"], &[], "v a b\n");
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    let records: serde_json::Value = serde_json::from_str(&line).unwrap();
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[1]["truncated"], serde_json::json!(true));
    assert_eq!(records[1]["max_analyses"], serde_json::json!(1));
}

#[test]
fn env_cap_applies_and_flag_wins() {
    let g = write_temp("ambig-env.dg", AMBIG);
    let truncated = dg_stdin(&["parse", "-g", &g], &[("DG_MAX_ANALYSES", "1")], "v a b\n");
    assert!(stdout(&truncated).contains("\"truncated\":true"));

    let full = dg_stdin(
        &["parse", "-g", &g, "--max-analyses", "50"],
        &[("DG_MAX_ANALYSES", "1")],
        "v a b\n",
    );
    assert!(!stdout(&full).contains("truncated"));
    let records: serde_json::Value = serde_json::from_str(&stdout(&full)).unwrap();
    assert_eq!(records.as_array().unwrap().len(), 2);
}

#[test]
fn sexp_emission_prints_phrase_markers() {
    let out = dg_stdin(
        &[
            "parse",
            "-g",
            &fixture("dnv.dg"),
            "--emit",
            "pm",
            "--format",
            "sexp",
        ],
        &[],
        "the dog barks\n",
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "( ( the/D ^dog/N ) ^barks/V )\n");
}

#[test]
fn conll_format_requires_ds_emission() {
    let out = dg_stdin(
        &[
            "parse",
            "-g",
            &fixture("dnv.dg"),
            "--emit",
            "pm",
            "--format",
            "conll",
        ],
        &[],
        "the dog barks\n",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--format conll only emits ds"));
}

#[test]
fn parsed_conll_revalidates_clean() {
    let parsed = dg(&[
        "parse",
        "-g",
        &fixture("dnv.dg"),
        "-i",
        &fixture("sentences.txt"),
        "--emit",
        "ds",
        "--format",
        "conll",
    ]);
    assert_eq!(parsed.status.code(), Some(0));
    let validated = dg_stdin(&["validate", "--format", "conll"], &[], &stdout(&parsed));
    assert_eq!(validated.status.code(), Some(0));
    assert_eq!(stdout(&validated), "[]\n");
}

#[test]
fn validate_reports_per_conll_sentence() {
    let input = "1\ta\tX\t0\t_\n\n1\ta\tX\t2\t_\n2\tb\tX\t0\t_\n3\tc\tX\t1\t_\n";
    let out = dg_stdin(&["validate", "--format", "conll"], &[], input);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout(&out);
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "[]");
    assert!(lines[1].contains("\"axiom\":\"A4\""));
}

#[test]
fn validate_rejects_malformed_json() {
    let out = dg_stdin(&["validate"], &[], "{\"tokens\": [}");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convert_round_trip_with_label_side_channel() {
    let labels = std::env::temp_dir().join(format!("dg-labels-{}.json", std::process::id()));
    let labels = labels.to_str().unwrap();
    let conll = "1\tthe\tD\t2\tDET\n2\tdog\tN\t3\tSUBJ\n3\tbarks\tV\t0\t_\n";

    let to_pm = dg_stdin(
        &[
            "convert", "--from", "ds", "--to", "pm", "--format", "conll", "--labels", labels,
        ],
        &[],
        conll,
    );
    assert_eq!(to_pm.status.code(), Some(0));
    assert_eq!(stdout(&to_pm), "( ( the/D ^dog/N ) ^barks/V )\n");

    let back = dg_stdin(
        &[
            "convert", "--from", "pm", "--to", "ds", "--format", "conll", "--labels", labels,
        ],
        &[],
        &stdout(&to_pm),
    );
    assert_eq!(back.status.code(), Some(0));
    assert_eq!(stdout(&back), format!("{conll}\n"));
}

#[test]
fn convert_rejects_ill_formed_structures() {
    let out = dg_stdin(
        &["convert", "--from", "ds", "--to", "pm"],
        &[],
        &std::fs::read_to_string(fixture("covered_root.json")).unwrap(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not a well-formed projective tree"));
}

#[test]
fn convert_conll_cannot_carry_multiple_heads() {
    let multi = r#"{"tokens":[{"form":"a","cat":"X"},{"form":"b","cat":"X"},{"form":"c","cat":"X"}],"arcs":[{"head":1,"dep":3,"label":"_"},{"head":2,"dep":3,"label":"_"}]}"#;
    let out = dg_stdin(
        &["convert", "--from", "ds", "--to", "ds", "--format", "conll"],
        &[],
        multi,
    );
    // conll input cannot even express it; json input with conll output must fail too.
    assert_eq!(out.status.code(), Some(2));

    let json_in = dg_stdin(&["convert", "--from", "ds", "--to", "ds"], &[], multi);
    assert_eq!(json_in.status.code(), Some(0));
}

#[test]
fn grammar_errors_are_exit_two_with_diagnostics() {
    let g = write_temp("rootless.dg", "cat V\nleaf V\nword runs : V\n");
    let out = dg_stdin(&["parse", "-g", &g], &[], "runs\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no root category declared"));
}

#[test]
fn fstruct_emission_carries_gaps_and_coref() {
    let g = write_temp(
        "topic.dg",
        "cat X Y A B\nroot X\nleaf A B\nrule X : * Y:COMMENT\nrule Y : A:SUBJ B:XARG *\nword topic : X\nword s : A\nword v : B\nword y : Y\nframe topic : COMMENT\nframe y : SUBJ XARG OBJ\ncontrol X : COMMENT.OBJ = SELF\n",
    );
    let out = dg_stdin(
        &["parse", "-g", &g, "--emit", "fstruct,sem"],
        &[],
        "topic s v y\n",
    );
    assert_eq!(out.status.code(), Some(0));
    let records: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let record = &records.as_array().unwrap()[0];
    assert_eq!(record["fstruct"]["attrs"]["COMMENT"]["gaps"]["OBJ"], "x1");
    assert_eq!(record["coref"]["x1"], 1);
    assert_eq!(record["sem"], "topic(y(s, v, x1)) # x1 = token[1]");
}
