//! End-to-end checks of the `gist` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gist"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

#[test]
fn no_arguments_is_a_usage_error_with_status_2() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "{stderr}");
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = bin().args(["eval", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_with_runs_adds_random_rows() {
    let out = bin()
        .current_dir(fixtures())
        .args(["eval", "judgments.csv", "--runs", "8", "--seed", "1"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    let random_rows = stdout.lines().filter(|l| l.starts_with("random ")).count();
    assert_eq!(random_rows, 8, "{stdout}");
    for id in ["random-1", "random-8", "c1", "e1"] {
        assert!(stdout.contains(id), "missing {id} in:\n{stdout}");
    }
}

#[test]
fn eval_is_deterministic_given_a_seed() {
    let run = || {
        bin()
            .current_dir(fixtures())
            .args(["eval", "judgments.csv", "--runs", "4", "--seed", "9"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn eval_rejects_bad_data_with_status_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "subject,condition,item,category\nx,control,i,weird\n").unwrap();
    let out = bin().arg("eval").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn eval_writes_machine_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = bin()
        .current_dir(fixtures())
        .args(["eval", "judgments.csv", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let content = std::fs::read_to_string(&csv).unwrap();
    assert!(content.starts_with("subject,condition,mean_distance,ci_lo,ci_hi\n"));
    assert_eq!(content.lines().count(), 1 + 5);
}

#[test]
fn train_langid_writes_a_loadable_profile() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    std::fs::write(
        &corpus,
        "palabras de ejemplo para entrenar un perfil ".repeat(10),
    )
    .unwrap();
    let profile = dir.path().join("xx.profile");
    let out = bin()
        .arg("train-langid")
        .arg(&corpus)
        .args(["--lang", "xx", "--n", "2", "-o"])
        .arg(&profile)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&profile).unwrap();
    assert!(text.starts_with("langid-profile v1 xx n=2\n"), "{text}");
}

#[test]
fn train_langid_refuses_short_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("tiny.txt");
    std::fs::write(&corpus, "tiny").unwrap();
    let out = bin()
        .arg("train-langid")
        .arg(&corpus)
        .args(["--lang", "xx", "-o"])
        .arg(dir.path().join("out.profile"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("100"));
}

#[test]
fn gist_requires_a_dictionary_for_the_target_language() {
    let out = bin()
        .current_dir(fixtures())
        .args(["gist", "toy.html", "--to", "fr", "--config", "toy.conf"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fr"));
}

#[test]
fn gist_on_a_local_file_reports_stats_on_stderr() {
    let out = bin()
        .current_dir(fixtures())
        .args(["gist", "toy.html", "--to", "en", "--config", "toy.conf"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("gisted"), "{stderr}");
    assert!(!out.stdout.is_empty());
}
