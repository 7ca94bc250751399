use std::path::Path;
use std::process::Command;

fn varlen(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_varlen")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = varlen(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_run_report_generate_dist() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let run = dir.path().join("run");
    ok(&["synth", "--out", s(&data), "--name", "Demo", "--train-per-class", "3", "--test-per-class", "3", "--length", "30"]);

    let out = ok(&[
        "run", "--data", s(&data), "--out", s(&run), "--seed", "7", "--jobs", "2", "--trees", "5",
        "--mechanisms", "prefix,suffix", "--classifiers", "nn-ed,nn-dtw,boss,pf", "--report",
    ]);
    assert!(out.contains("0 failed"), "{out}");
    assert!(run.join("results.csv").is_file());
    assert!(run.join("report/all-pairs_prefix.svg").is_file());
    assert!(run.join("report/by-classifier_suffix.txt").is_file());

    let report = dir.path().join("report");
    let out = ok(&["report", "--results", s(&run), "--out", s(&report), "--alpha", "0.1", "--scope", "by-preprocessor"]);
    assert_eq!(out.lines().count(), 2, "{out}");
    assert!(report.join("by-preprocessor_prefix.csv").is_file());

    let generated = dir.path().join("gen");
    ok(&["generate", "--data", s(&data), "--out", s(&generated), "--mechanisms", "subsequence"]);
    let train = generated.join("subsequence/Demo/Demo_TRAIN.tsv");
    assert!(train.is_file());

    let d = ok(&["dist", "--measure", "dtw", s(&train), s(&train)]);
    assert_eq!(d.trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn hard_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = varlen(&["run", "--data", s(dir.path()), "--out", s(&dir.path().join("o"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = varlen(&["run", "--data", ".", "--out", "o", "--classifiers", "nope"]);
    assert!(!out.status.success());
}
