use std::fs;

use varlen::experiment::{
    read_results, run_experiment, run_on_datasets, Classifier, ExperimentConfig, Variation, JOURNAL_FILE, MANIFEST_FILE,
    RESULTS_FILE,
};
use varlen::generators::Mechanism;
use varlen::preprocess::PreprocessorKind;
use varlen::synthetic::{shapes_dataset, ShapeSpec};
use varlen::ucr::write_dataset;
use varlen::{Dataset, TimeSeries};

fn small(name: &str, seed: u64) -> Dataset {
    let spec = ShapeSpec {
        classes: 2,
        train_per_class: 3,
        test_per_class: 3,
        length: 24,
        ..ShapeSpec::default()
    };
    shapes_dataset(name, &spec, seed).unwrap()
}

fn quick_cfg(out: &std::path::Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Vec::new(), out.to_path_buf());
    cfg.mechanisms = vec![Variation::Generated(Mechanism::Suffix), Variation::Generated(Mechanism::UniformSampling)];
    cfg.pf.num_trees = 5;
    cfg.jobs = 2;
    cfg
}

#[test]
fn rerun_reuses_every_task() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_cfg(dir.path());
    let data = [small("A", 1), small("B", 2)];
    let first = run_on_datasets(&data, &cfg).unwrap();
    assert_eq!(first.records.len(), 2 * 2 * 28);
    assert_eq!(first.computed, first.records.len());
    let results = fs::read(dir.path().join(RESULTS_FILE)).unwrap();

    let second = run_on_datasets(&data, &cfg).unwrap();
    assert_eq!(second.computed, 0);
    assert_eq!(second.reused, first.records.len());
    assert_eq!(fs::read(dir.path().join(RESULTS_FILE)).unwrap(), results);
    assert!(dir.path().join(MANIFEST_FILE).is_file());
}

#[test]
fn interrupted_journal_is_completed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_cfg(dir.path());
    let data = [small("A", 3)];
    let full = run_on_datasets(&data, &cfg).unwrap();
    let expected = fs::read(dir.path().join(RESULTS_FILE)).unwrap();

    // keep the header and ten rows, then a torn line
    let journal = dir.path().join(JOURNAL_FILE);
    let text = fs::read_to_string(&journal).unwrap();
    let mut kept: Vec<&str> = text.lines().take(11).collect();
    kept.push("A,suffix,none");
    fs::write(&journal, kept.join("\n") + "\n").unwrap();
    fs::remove_file(dir.path().join(RESULTS_FILE)).unwrap();

    let resumed = run_on_datasets(&data, &cfg).unwrap();
    assert_eq!(resumed.reused, 10);
    assert_eq!(resumed.computed, full.records.len() - 10);
    assert_eq!(fs::read(dir.path().join(RESULTS_FILE)).unwrap(), expected);
}

#[test]
fn failures_are_recorded_and_retried() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_cfg(dir.path());
    cfg.mechanisms = vec![Variation::Original];
    cfg.classifiers = vec![Classifier::Boss, Classifier::NnEd];
    cfg.preprocessors = vec![PreprocessorKind::UniformScaling];
    // series of length 2 hold no BOSS window, so BOSS fails and 1-NN does not
    let tiny = Dataset::new(
        "Tiny",
        vec![TimeSeries::new(vec![0.0, 1.0], "a").unwrap(), TimeSeries::new(vec![1.0, 0.0], "b").unwrap()],
        vec![TimeSeries::new(vec![0.0, 1.0], "a").unwrap()],
    )
    .unwrap();
    let run = run_on_datasets(std::slice::from_ref(&tiny), &cfg).unwrap();
    assert_eq!(run.records.len(), 2);
    let boss = run.records.iter().find(|r| r.classifier == Classifier::Boss).unwrap();
    assert!(boss.accuracy.is_none() && boss.error.is_some());
    let nn = run.records.iter().find(|r| r.classifier == Classifier::NnEd).unwrap();
    assert_eq!(nn.accuracy, Some(1.0));

    let again = run_on_datasets(&[tiny], &cfg).unwrap();
    assert_eq!((again.computed, again.reused), (1, 1));
    let stored = read_results(&dir.path().join(RESULTS_FILE)).unwrap();
    assert_eq!(stored.len(), 2);
    assert_eq!(stored[0].error, again.records[0].error);
}

#[test]
fn loads_datasets_from_disk() {
    let data = tempfile::tempdir().unwrap();
    write_dataset(data.path(), &small("Disk", 4)).unwrap();
    let out = tempfile::tempdir().unwrap();
    let mut cfg = quick_cfg(out.path());
    cfg.data = vec![data.path().to_path_buf()];
    cfg.classifiers = vec![Classifier::NnDtw, Classifier::NnUs];
    let run = run_experiment(&cfg).unwrap();
    assert_eq!(run.records.len(), 2 * 2 * 5);
    assert!(run.records.iter().all(|r| r.dataset == "Disk" && r.succeeded()));
    let back = read_results(&out.path().join(RESULTS_FILE)).unwrap();
    for (a, b) in back.iter().zip(&run.records) {
        assert_eq!((a.accuracy, a.seed), (b.accuracy, b.seed));
    }
}

#[test]
fn seeds_isolate_tasks() {
    // dropping a classifier must not change the others' results
    let data = [small("A", 5)];
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let all = run_on_datasets(&data, &quick_cfg(d1.path())).unwrap();
    let mut cfg = quick_cfg(d2.path());
    cfg.classifiers = vec![Classifier::Pf];
    let pf_only = run_on_datasets(&data, &cfg).unwrap();
    for r in &pf_only.records {
        let same = all.records.iter().find(|x| x.key() == r.key()).unwrap();
        assert_eq!(same.accuracy, r.accuracy);
    }
}
