use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../examples")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn scratch(name: &str, content: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refclass")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn query_prints_the_probability_last() {
    let out = run(&["query", &example("mets1.rcl"), "t"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "Prob = [3/10, 1/2]\n");
}

#[test]
fn query_accepts_a_membership_literal() {
    let out = run(&["query", &example("mets1.rcl"), "(member m V)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "Prob = [3/10, 1/2]\n");
}

#[test]
fn conflict_resolves_with_constructions_and_falls_back_without() {
    let out = run(&["query", &example("conflict.rcl"), "t"]);
    assert_eq!(stdout(&out), "Prob = [2/9, 28/31]\n");

    let out = run(&["query", &example("conflict.rcl"), "t", "--no-constructions"]);
    assert_eq!(stdout(&out), "Prob = [0, 1]\n");
}

#[test]
fn human_trace_precedes_the_result() {
    let out = run(&["query", &example("conflict.rcl"), "t", "--trace", "human"]);
    let text = stdout(&out);
    assert!(text.contains("candidates:"));
    assert!(text.contains("[H,K] reflects H×K (construction)"));
    assert!(text.ends_with("Prob = [2/9, 28/31]\n"));
}

#[test]
fn json_trace_keeps_its_field_order() {
    let out = run(&["query", &example("conflict.rcl"), "t", "--trace", "json"]);
    let text = stdout(&out);
    assert!(text.ends_with("Prob = [2/9, 28/31]\n"));

    let json_part = &text[..text.rfind("Prob = ").unwrap()];
    let value: serde_json::Value = serde_json::from_str(json_part).unwrap();
    assert_eq!(value["prob"][0], "2/9");
    assert_eq!(value["prob"][1], "28/31");
    assert_eq!(value["outcome"], "selected");

    let keys = ["query", "equivalences", "candidates", "disagreements", "reflections",
        "iterations", "outcome", "prob", "warnings"];
    let mut last = 0;
    for key in keys {
        let pos = json_part.find(&format!("\"{key}\"")).unwrap();
        assert!(pos > last, "{key} appears in declaration order");
        last = pos;
    }
}

#[test]
fn check_reports_document_shape() {
    let out = run(&["check", &example("mets1.rcl")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ok: 4 classes, 1 individuals, 2 statistics\n");
}

#[test]
fn parse_errors_use_compiler_style_positions_and_exit_1() {
    let path = scratch("undeclared.rcl", "class H\nstat H V [0.3, 0.5]\n");
    let out = run(&["check", &path]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains(":2:"), "position points at line 2: {err}");
    assert!(err.contains("undeclared class"), "names the failure: {err}");
}

#[test]
fn reversed_intervals_are_rejected() {
    let path = scratch("reversed.rcl", "class H\nclass V\nstat H V [0.6, 0.2]\n");
    let out = run(&["check", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn minimal_mode_rejects_subset_assertions() {
    let path = scratch("subsets.rcl", "class A\nclass B\nsubset A B\n");
    assert_eq!(run(&["check", &path]).status.code(), Some(0));
    let out = run(&["check", &path, "--minimal"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("minimal"));
}

#[test]
fn unresolvable_queries_exit_2() {
    let out = run(&["query", &example("mets1.rcl"), "u"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr(&out).is_empty());

    let out = run(&["query", &example("mets1.rcl"), "(member ghost V)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_files_exit_1() {
    let out = run(&["check", "no-such-file.rcl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn classes_lists_the_membership_lattice_with_statistics() {
    let out = run(&["classes", &example("mets1.rcl"), "m"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let listed: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with(' '))
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(listed, ["D", "H", "K", "D&H", "D&H&K", "D&K", "H&K"]);
    assert!(text.contains("  stat H V = [3/10, 1/2]"));
    assert!(text.contains("  stat D&H&K V = [0, 1]"));
    assert!(text.contains("(syntactic)"));
}

#[test]
fn classes_rejects_unknown_individuals() {
    let out = run(&["classes", &example("mets1.rcl"), "nobody"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nobody"));
}

#[test]
fn bounds_flag_adds_derived_candidates() {
    let path = scratch(
        "bounds.rcl",
        "class A\nclass B\nclass V\nmember x A\nmember x B\n\
         stat A V [0.3, 0.5]\nstat B V [0.4, 0.6]\nstat A B [0.8, 0.9]\n",
    );
    let plain = run(&["query", &path, "(member x V)", "--trace", "human"]);
    assert!(!stdout(&plain).contains("(bounds)"));
    let with = run(&["query", &path, "(member x V)", "--bounds", "--trace", "human"]);
    assert!(stdout(&with).contains("(bounds)"));
}
