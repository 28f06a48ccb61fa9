//! CLI contract tests: exit codes, validation order, dry runs, config
//! precedence and output formats.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cswgec"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

const REF_M2: &str = "S a b c\n\
                      A 0 1|||T|||x|||REQUIRED|||-NONE-|||0\n\
                      A 1 2|||T|||y|||REQUIRED|||-NONE-|||0\n\
                      A 2 3|||T|||z|||REQUIRED|||-NONE-|||0\n\
                      \n\
                      S d e f\n\
                      A 0 1|||T|||p|||REQUIRED|||-NONE-|||0\n\
                      A 1 2|||T|||q|||REQUIRED|||-NONE-|||0\n";

#[test]
fn score_prints_counts_line_with_expected_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ref.m2", REF_M2);
    write(dir.path(), "hyp.txt", "x b c\np e WRONG\n");

    let output = run(
        &[
            "score", "--ref", "ref.m2", "--hyp", "hyp.txt", "--beta", "0.5",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{}", stderr_of(&output));
    let stdout = stdout_of(&output);
    let summary = stdout.lines().last().unwrap();
    assert_eq!(summary, "TP=2 FP=1 FN=3 P=0.6667 R=0.4000 F0.5=0.5882");
    // The JSON precedes the summary when no --report is given.
    let json: serde_json::Value =
        serde_json::from_str(&stdout[..stdout.rfind("TP=").unwrap()]).unwrap();
    assert_eq!(json["tp"], 2);
    assert_eq!(json["fp"], 1);
    assert_eq!(json["fn"], 3);
}

#[test]
fn score_report_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ref.m2", REF_M2);
    write(dir.path(), "hyp.txt", "x b c\np e WRONG\n");
    let output = run(
        &[
            "score",
            "--ref",
            "ref.m2",
            "--hyp",
            "hyp.txt",
            "--report",
            "score.json",
        ],
        dir.path(),
    );
    assert!(output.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("score.json")).unwrap())
            .unwrap();
    assert!((json["f"].as_f64().unwrap() - 0.5882).abs() < 1e-4);
    // No stray temporary files.
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| !["ref.m2", "hyp.txt", "score.json"].contains(&n.as_str()))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn perfect_hypothesis_scores_one_via_m2_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ref.m2", REF_M2);
    write(dir.path(), "hyp.m2", REF_M2);
    let output = run(&["score", "--ref", "ref.m2", "--hyp", "hyp.m2"], dir.path());
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("F0.5=1.0000"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "in.m2",
        "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
    );
    write(dir.path(), "dict.tsv", "a\t你\n");

    // Phrase method without --trees: validated before any file is read.
    let output = run(
        &[
            "generate",
            "--input",
            "missing-on-purpose.m2",
            "--out",
            "o.m2",
            "--method",
            "rand-phrase",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(
        stderr_of(&output).contains("tree required"),
        "{}",
        stderr_of(&output)
    );

    // noun-token without --pos.
    let output = run(
        &[
            "generate",
            "--input",
            "in.m2",
            "--out",
            "o.m2",
            "--method",
            "noun-token",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("pos required"));

    // Unknown flag and unknown method.
    let output = run(&["generate", "--nonsense"], dir.path());
    assert_eq!(output.status.code(), Some(1));
    let output = run(
        &[
            "generate",
            "--input",
            "in.m2",
            "--out",
            "o.m2",
            "--method",
            "bogus",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));

    // Bad ratio.
    let output = run(
        &[
            "generate",
            "--input",
            "in.m2",
            "--out",
            "o.m2",
            "--method",
            "cont-token",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
            "--ratio",
            "1.5",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));

    // Missing required flag.
    let output = run(&["score", "--hyp", "hyp.txt"], dir.path());
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("--ref"));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "dict.tsv", "a\t你\n");

    // Missing input file.
    let output = run(
        &[
            "generate",
            "--input",
            "absent.m2",
            "--out",
            "o.m2",
            "--method",
            "cont-token",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));

    // Malformed M2: span out of bounds.
    write(
        dir.path(),
        "bad.m2",
        "S a b\nA 3 4|||X|||c|||REQUIRED|||-NONE-|||0\n",
    );
    let output = run(
        &[
            "generate",
            "--input",
            "bad.m2",
            "--out",
            "o.m2",
            "--method",
            "cont-token",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("span out of bounds"));
    assert!(!dir.path().join("o.m2").exists(), "no partial output");
}

#[test]
fn backend_errors_exit_3_under_fail_fast() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "in.m2",
        "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
    );
    write(dir.path(), "dict.tsv", "unrelated\t你\n");
    let output = run(
        &[
            "generate",
            "--input",
            "in.m2",
            "--out",
            "o.m2",
            "--method",
            "cont-token",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
            "--fail-fast",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr_of(&output).contains("untranslatable"));
    assert!(!dir.path().join("o.m2").exists());
}

#[test]
fn skipped_sentences_without_fail_fast_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "in.m2",
        "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
    );
    write(dir.path(), "dict.tsv", "unrelated\t你\n");
    let output = run(
        &[
            "generate",
            "--input",
            "in.m2",
            "--out",
            "o.m2",
            "--method",
            "cont-token",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
            "--report",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["sentencesSkipped"], 1);
    assert_eq!(report["sentencesOut"], 0);
}

#[test]
fn dry_run_prints_resolved_config_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "in.m2",
        "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
    );
    write(dir.path(), "dict.tsv", "a\t你\nb\t好\n");
    let output = run(
        &[
            "generate",
            "--input",
            "in.m2",
            "--out",
            "o.m2",
            "--method",
            "cont-token",
            "--target-lang",
            "zh",
            "--backend",
            "dict:dict.tsv",
            "--dry-run",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    let config: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(config["command"], "generate");
    assert_eq!(config["method"], "cont-token");
    assert_eq!(config["ratio"], 0.2);
    assert_eq!(config["seed"], 0);
    assert_eq!(config["annotator"], 0);
    assert!(!dir.path().join("o.m2").exists());
}

#[test]
fn flags_override_config_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "in.m2",
        "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
    );
    write(dir.path(), "dict.tsv", "a\t你\nb\t好\n");
    write(
        dir.path(),
        "cfg.json",
        r#"{"input":"in.m2","output":"o.m2","method":"cont-token","targetLang":"zh","backend":"dict:dict.tsv","seed":7,"ratio":0.5}"#,
    );
    let output = run(
        &[
            "generate",
            "--config",
            "cfg.json",
            "--seed",
            "9",
            "--dry-run",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    let config: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(config["seed"], 9, "flag beats config file");
    assert_eq!(config["ratio"], 0.5, "config file beats default");
    assert_eq!(config["targetLang"], "zh");

    // Unknown config keys are usage errors.
    write(dir.path(), "bad.json", r#"{"tyop": 1}"#);
    let output = run(
        &["generate", "--config", "bad.json", "--dry-run"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn stats_reports_aggregates_on_text_input() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "corpus.txt",
        "But the 지불 a little low .\nall english here .\n",
    );
    let output = run(&["stats", "--input", "corpus.txt"], dir.path());
    assert!(output.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(json["sentences"], 2);
    let mean = json["ratio"]["mean"].as_f64().unwrap();
    assert!((mean - (100.0 / 6.0) / 2.0).abs() < 1e-6, "mean = {mean}");
    assert_eq!(json["spf"]["mean"].as_f64().unwrap(), 1.0);
}

#[test]
fn stats_side_selection_on_m2() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "in.m2",
        "S the 지불 late\nA 2 3|||T|||grew|||REQUIRED|||-NONE-|||0\n",
    );
    let source = run(&["stats", "--input", "in.m2"], dir.path());
    let corrected = run(
        &["stats", "--input", "in.m2", "--side", "corrected"],
        dir.path(),
    );
    let a: serde_json::Value = serde_json::from_str(&stdout_of(&source)).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout_of(&corrected)).unwrap();
    // Same ratio either side here, but both parse and report.
    assert_eq!(a["sentences"], 1);
    assert_eq!(b["sentences"], 1);
}

#[test]
fn filter_writes_survivors_and_report() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "pairs.tsv",
        "the 지불 is low\tthe 지불 was low\n\
         the 지불 is low\tthe 지불 is low\n\
         all english\tall english fixed\n",
    );
    let output = run(
        &[
            "filter",
            "--input",
            "pairs.tsv",
            "--target-lang",
            "ko",
            "--out",
            "kept.tsv",
            "--report",
            "fr.json",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{}", stderr_of(&output));
    let kept = std::fs::read_to_string(dir.path().join("kept.tsv")).unwrap();
    assert_eq!(kept, "the 지불 is low\tthe 지불 was low\n");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fr.json")).unwrap())
            .unwrap();
    assert_eq!(report["pairsIn"], 3);
    assert_eq!(report["pairsKept"], 1);
    assert_eq!(report["removedNoCorrection"], 1);
    assert_eq!(report["removedWrongLanguage"], 1);
}

#[test]
fn help_and_version_exit_0() {
    let output = bin().arg("--help").output().unwrap();
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("generate"));
    let output = bin().arg("--version").output().unwrap();
    assert!(output.status.success());
}
