//! The (dataset × length variation × preprocessor × classifier) runner.
//!
//! Each completed task is appended to `journal.csv` as soon as it finishes.
//! When the run ends, `results.csv` is rewritten from the journal in key
//! order and without timings, so it depends only on the inputs and the
//! master seed. A rerun over the same directory skips every key that
//! already succeeded.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::DistanceMeasure;
use crate::ensemble::{BossModel, PfConfig, PfModel, SfaConfig};
use crate::error::{Error, Result};
use crate::generators::{modify_dataset, GeneratorConfig, Mechanism};
use crate::nn::{accuracy, NnModel};
use crate::preprocess::{Preprocessor, PreprocessorKind};
use crate::seed::derive_seed;
use crate::series::Dataset;
use crate::ucr::discover_datasets;

pub const JOURNAL_FILE: &str = "journal.csv";
pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classifier {
    NnEd,
    NnDtw,
    NnSsd,
    NnUs,
    NnSbd,
    Boss,
    Pf,
}

impl Classifier {
    pub const ALL: [Classifier; 7] = [
        Classifier::NnEd,
        Classifier::NnDtw,
        Classifier::NnSsd,
        Classifier::NnUs,
        Classifier::NnSbd,
        Classifier::Boss,
        Classifier::Pf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Classifier::NnEd => "nn-ed",
            Classifier::NnDtw => "nn-dtw",
            Classifier::NnSsd => "nn-ssd",
            Classifier::NnUs => "nn-us",
            Classifier::NnSbd => "nn-sbd",
            Classifier::Boss => "boss",
            Classifier::Pf => "pf",
        }
    }

    /// Distance used by the 1-NN classifiers.
    pub fn measure(self) -> Option<DistanceMeasure> {
        match self {
            Classifier::NnEd => Some(DistanceMeasure::EuclideanTruncate),
            Classifier::NnDtw => Some(DistanceMeasure::DtwFull),
            Classifier::NnSsd => Some(DistanceMeasure::SubsequenceSliding),
            Classifier::NnUs => Some(DistanceMeasure::UniformScalingDist),
            Classifier::NnSbd => Some(DistanceMeasure::ShapeBased),
            Classifier::Boss | Classifier::Pf => None,
        }
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Classifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Classifier::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "classifier",
                name: s.to_string(),
            })
    }
}

/// Whether `classifier` is run after `preprocessor`.
///
/// BOSS and PF need equal lengths and are only paired with the stretching and
/// noise-padding techniques; sliding ED only with raw data and the single
/// zero padding.
pub fn applicable(preprocessor: PreprocessorKind, classifier: Classifier) -> bool {
    use PreprocessorKind as P;
    match classifier {
        Classifier::NnEd | Classifier::NnDtw | Classifier::NnUs | Classifier::NnSbd => true,
        Classifier::NnSsd => matches!(preprocessor, P::NoProcessing | P::PrefixSuffixZero),
        Classifier::Boss | Classifier::Pf => {
            matches!(preprocessor, P::UniformScaling | P::SuffixNoise | P::PrefixSuffixNoise)
        }
    }
}

/// Every applicable pair, preprocessors in declaration order.
pub fn applicable_pairs() -> Vec<(PreprocessorKind, Classifier)> {
    PreprocessorKind::ALL
        .into_iter()
        .flat_map(|p| Classifier::ALL.into_iter().map(move |c| (p, c)))
        .filter(|&(p, c)| applicable(p, c))
        .collect()
}

/// Where a dataset's length variation comes from: one of the generators, or
/// the data as loaded (for archives that already vary in length).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Variation {
    Generated(Mechanism),
    Original,
}

impl Variation {
    pub fn name(self) -> &'static str {
        match self {
            Variation::Generated(m) => m.name(),
            Variation::Original => "original",
        }
    }
}

impl fmt::Display for Variation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("original") {
            return Ok(Variation::Original);
        }
        s.parse().map(Variation::Generated).map_err(|_| Error::UnknownName {
            kind: "mechanism",
            name: s.to_string(),
        })
    }
}

impl From<Variation> for String {
    fn from(v: Variation) -> String {
        v.name().to_string()
    }
}

impl TryFrom<String> for Variation {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Directories searched for `<name>_TRAIN` / `<name>_TEST` pairs.
    pub data: Vec<PathBuf>,
    pub mechanisms: Vec<Variation>,
    pub preprocessors: Vec<PreprocessorKind>,
    pub classifiers: Vec<Classifier>,
    pub master_seed: u64,
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub modified_fraction: f64,
    pub walk_std: f64,
    pub noise_amplitude: f64,
    pub boss: SfaConfig,
    /// Forest settings; the seed field is replaced per task.
    pub pf: PfConfig,
}

impl ExperimentConfig {
    pub fn new(data: Vec<PathBuf>, out_dir: PathBuf) -> Self {
        let g = GeneratorConfig::default();
        Self {
            data,
            mechanisms: Mechanism::ALL.into_iter().map(Variation::Generated).collect(),
            preprocessors: PreprocessorKind::ALL.to_vec(),
            classifiers: Classifier::ALL.to_vec(),
            master_seed: 0,
            jobs: 0,
            out_dir,
            modified_fraction: g.modified_fraction,
            walk_std: g.walk_std,
            noise_amplitude: 1e-3,
            boss: SfaConfig::default(),
            pf: PfConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mechanisms.is_empty() || self.preprocessors.is_empty() || self.classifiers.is_empty() {
            return Err(Error::InvalidInput(
                "mechanisms, preprocessors and classifiers must be non-empty".into(),
            ));
        }
        if !self.preprocessors.iter().any(|&p| self.classifiers.iter().any(|&c| applicable(p, c))) {
            return Err(Error::InvalidInput(
                "no applicable preprocessor/classifier pair in the selection".into(),
            ));
        }
        GeneratorConfig {
            seed: 0,
            modified_fraction: self.modified_fraction,
            walk_std: self.walk_std,
        }
        .validate()?;
        if !(self.noise_amplitude > 0.0 && self.noise_amplitude.is_finite()) {
            return Err(Error::InvalidInput("noise amplitude must be positive".into()));
        }
        self.boss.validate()?;
        self.pf.validate()
    }

    fn pairs(&self) -> Vec<(PreprocessorKind, Classifier)> {
        applicable_pairs()
            .into_iter()
            .filter(|(p, c)| self.preprocessors.contains(p) && self.classifiers.contains(c))
            .collect()
    }
}

/// Identity of one unit of work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskKey<'a> {
    pub dataset: &'a str,
    pub mechanism: Variation,
    pub preprocessor: PreprocessorKind,
    pub classifier: Classifier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset: String,
    pub mechanism: Variation,
    pub preprocessor: PreprocessorKind,
    pub classifier: Classifier,
    /// Test accuracy; absent when the task failed.
    pub accuracy: Option<f64>,
    pub wall_time_seconds: f64,
    /// Seed of the classifier (the forest's seed; recorded for every task).
    pub seed: u64,
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn key(&self) -> TaskKey<'_> {
        TaskKey {
            dataset: &self.dataset,
            mechanism: self.mechanism,
            preprocessor: self.preprocessor,
            classifier: self.classifier,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.error.is_none() && self.accuracy.is_some()
    }
}

/// `results.csv` row: a record without its timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ResultRow {
    dataset: String,
    mechanism: Variation,
    preprocessor: PreprocessorKind,
    classifier: Classifier,
    accuracy: Option<f64>,
    seed: u64,
    error: Option<String>,
}

impl From<&ResultRecord> for ResultRow {
    fn from(r: &ResultRecord) -> Self {
        Self {
            dataset: r.dataset.clone(),
            mechanism: r.mechanism,
            preprocessor: r.preprocessor,
            classifier: r.classifier,
            accuracy: r.accuracy,
            seed: r.seed,
            error: r.error.clone(),
        }
    }
}

impl From<ResultRow> for ResultRecord {
    fn from(r: ResultRow) -> Self {
        Self {
            dataset: r.dataset,
            mechanism: r.mechanism,
            preprocessor: r.preprocessor,
            classifier: r.classifier,
            accuracy: r.accuracy,
            wall_time_seconds: 0.0,
            seed: r.seed,
            error: r.error,
        }
    }
}

/// Seed that perturbs lengths of `dataset` under `mechanism`.
pub fn modification_seed(master: u64, dataset: &str, mechanism: Variation) -> u64 {
    derive_seed(master, &["modify", dataset, mechanism.name()])
}

/// Seed of the padding noise.
pub fn preprocessing_seed(master: u64, dataset: &str, mechanism: Variation, pre: PreprocessorKind) -> u64 {
    derive_seed(master, &["preprocess", dataset, mechanism.name(), pre.name()])
}

/// Seed handed to the classifier.
pub fn classifier_seed(master: u64, key: &TaskKey<'_>) -> u64 {
    derive_seed(
        master,
        &[
            "classify",
            key.dataset,
            key.mechanism.name(),
            key.preprocessor.name(),
            key.classifier.name(),
        ],
    )
}

/// Applies `variation` to `d` with the seed derived for it.
pub fn vary(d: &Dataset, variation: Variation, cfg: &ExperimentConfig) -> Result<Dataset> {
    match variation {
        Variation::Original => Ok(d.clone()),
        Variation::Generated(m) => modify_dataset(
            d,
            m,
            &GeneratorConfig {
                seed: modification_seed(cfg.master_seed, &d.name, variation),
                modified_fraction: cfg.modified_fraction,
                walk_std: cfg.walk_std,
            },
        ),
    }
}

/// Fits `classifier` on the training split and returns test accuracy.
pub fn evaluate(classifier: Classifier, d: &Dataset, cfg: &ExperimentConfig, seed: u64) -> Result<f64> {
    let labels = d.test.iter().map(|q| q.label());
    match classifier.measure() {
        Some(measure) => Ok(NnModel::new(d.train.clone(), measure)?.evaluate_accuracy(&d.test)),
        None if classifier == Classifier::Boss => {
            let model = BossModel::fit(&d.train, &cfg.boss)?;
            let predicted = d.test.iter().map(|q| model.predict(q)).collect::<Result<Vec<_>>>()?;
            Ok(accuracy(predicted.iter().zip(labels)))
        }
        None => {
            let pf = PfConfig { seed, ..cfg.pf.clone() };
            let model = PfModel::fit(&d.train, &pf)?;
            let predicted: Vec<_> = d.test.iter().map(|q| model.predict(q)).collect();
            Ok(accuracy(predicted.iter().zip(labels)))
        }
    }
}

/// Loads every dataset found in `cfg.data`, sorted by name.
pub fn load_datasets(cfg: &ExperimentConfig) -> Result<Vec<Dataset>> {
    let mut files = Vec::new();
    for dir in &cfg.data {
        files.extend(discover_datasets(dir)?);
    }
    files.sort();
    if let Some(w) = files.windows(2).find(|w| w[0].name == w[1].name) {
        return Err(Error::InvalidInput(format!(
            "dataset `{}` found twice ({} and {})",
            w[0].name,
            w[0].train.display(),
            w[1].train.display()
        )));
    }
    files.iter().map(|f| f.load()).collect()
}

fn read_journal(path: &Path) -> Result<Vec<ResultRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<ResultRecord>().enumerate() {
        match row {
            Ok(r) => out.push(r),
            // a run killed mid-write can leave a torn last line
            Err(e) => log::warn!("{}: skipping unreadable journal row {}: {e}", path.display(), i + 2),
        }
    }
    Ok(out)
}

struct Journal {
    writer: csv::Writer<File>,
}

impl Journal {
    fn open(path: &Path) -> Result<Self> {
        let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let writer = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
        Ok(Self { writer })
    }

    fn append(&mut self, r: &ResultRecord) -> Result<()> {
        self.writer.serialize(r)?;
        self.writer.flush()?;
        Ok(())
    }
}

/// Reads `results.csv` (or a journal) back into records.
pub fn read_results(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().any(|h| h == "wall_time_seconds") {
        return Ok(reader.deserialize::<ResultRecord>().collect::<Result<_, _>>()?);
    }
    let rows: Vec<ResultRow> = reader.deserialize().collect::<Result<_, _>>()?;
    Ok(rows.into_iter().map(ResultRecord::from).collect())
}

pub fn write_results(path: &Path, records: &[ResultRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(ResultRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    datasets: Vec<ManifestDataset>,
    tasks: usize,
}

#[derive(Debug, Clone, Serialize)]
struct ManifestDataset {
    name: String,
    train: usize,
    test: usize,
    /// Modification seed per mechanism.
    seeds: BTreeMap<String, u64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    /// One record per task of the configuration, in key order.
    pub records: Vec<ResultRecord>,
    /// Tasks computed by this invocation.
    pub computed: usize,
    /// Tasks taken from an earlier journal.
    pub reused: usize,
}

impl RunSummary {
    pub fn failures(&self) -> impl Iterator<Item = &ResultRecord> {
        self.records.iter().filter(|r| !r.succeeded())
    }
}

/// Loads the configured datasets and runs every task.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let datasets = load_datasets(cfg)?;
    run_on_datasets(&datasets, cfg)
}

/// Runs every (dataset, mechanism, applicable pair) task on in-memory data.
pub fn run_on_datasets(datasets: &[Dataset], cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let names: BTreeSet<&str> = datasets.iter().map(|d| d.name.as_str()).collect();
    if names.len() != datasets.len() {
        return Err(Error::InvalidInput("dataset names must be unique".into()));
    }
    fs::create_dir_all(&cfg.out_dir)?;
    let pairs = cfg.pairs();
    let mut mechanisms = cfg.mechanisms.clone();
    mechanisms.sort();
    mechanisms.dedup();

    let mut keys: Vec<TaskKey<'_>> = Vec::new();
    for d in datasets {
        for &mechanism in &mechanisms {
            for &(preprocessor, classifier) in &pairs {
                keys.push(TaskKey {
                    dataset: &d.name,
                    mechanism,
                    preprocessor,
                    classifier,
                });
            }
        }
    }
    keys.sort();

    let manifest = Manifest {
        config: cfg,
        datasets: datasets
            .iter()
            .map(|d| ManifestDataset {
                name: d.name.clone(),
                train: d.train.len(),
                test: d.test.len(),
                seeds: mechanisms
                    .iter()
                    .map(|&m| (m.name().to_string(), modification_seed(cfg.master_seed, &d.name, m)))
                    .collect(),
            })
            .collect(),
        tasks: keys.len(),
    };
    fs::write(cfg.out_dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;

    let journal_path = cfg.out_dir.join(JOURNAL_FILE);
    let mut done: BTreeMap<(String, Variation, PreprocessorKind, Classifier), ResultRecord> = BTreeMap::new();
    for r in read_journal(&journal_path)? {
        done.insert((r.dataset.clone(), r.mechanism, r.preprocessor, r.classifier), r);
    }
    let owned = |k: &TaskKey<'_>| (k.dataset.to_string(), k.mechanism, k.preprocessor, k.classifier);
    let todo: Vec<TaskKey<'_>> = keys
        .iter()
        .filter(|k| !done.get(&owned(k)).is_some_and(ResultRecord::succeeded))
        .copied()
        .collect();
    let reused = keys.len() - todo.len();
    log::info!("{} tasks, {} already in the journal", keys.len(), reused);

    let by_name: BTreeMap<&str, &Dataset> = datasets.iter().map(|d| (d.name.as_str(), d)).collect();
    let journal = Mutex::new(Journal::open(&journal_path)?);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| {
        Error::InvalidInput(format!("cannot start {} workers: {e}", cfg.jobs))
    })?;

    let fresh: Vec<ResultRecord> = pool.install(|| {
        // modified and preprocessed data are shared by the tasks that need them
        let varied: BTreeMap<(&str, Variation), Result<Dataset, String>> = todo
            .iter()
            .map(|k| (k.dataset, k.mechanism))
            .collect::<BTreeSet<_>>()
            .into_par_iter()
            .map(|(name, m)| ((name, m), vary(by_name[name], m, cfg).map_err(|e| e.to_string())))
            .collect();
        let processed: BTreeMap<(&str, Variation, PreprocessorKind), Result<Dataset, String>> = todo
            .iter()
            .map(|k| (k.dataset, k.mechanism, k.preprocessor))
            .collect::<BTreeSet<_>>()
            .into_par_iter()
            .map(|(name, m, p)| {
                let out = varied[&(name, m)].clone().and_then(|d| {
                    let mut pre = Preprocessor::new(p, preprocessing_seed(cfg.master_seed, name, m, p));
                    pre.noise_amplitude = cfg.noise_amplitude;
                    pre.apply(&d).map_err(|e| e.to_string())
                });
                ((name, m, p), out)
            })
            .collect();
        drop(varied);

        todo.par_iter()
            .map(|k| {
                let seed = classifier_seed(cfg.master_seed, k);
                let start = Instant::now();
                let outcome = processed[&(k.dataset, k.mechanism, k.preprocessor)]
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|d| evaluate(k.classifier, d, cfg, seed).map_err(|e| e.to_string()));
                let record = ResultRecord {
                    dataset: k.dataset.to_string(),
                    mechanism: k.mechanism,
                    preprocessor: k.preprocessor,
                    classifier: k.classifier,
                    accuracy: outcome.as_ref().ok().copied(),
                    wall_time_seconds: start.elapsed().as_secs_f64(),
                    seed,
                    error: outcome.err(),
                };
                match &record.error {
                    Some(e) => log::warn!("{} {} {} {}: {e}", k.dataset, k.mechanism, k.preprocessor, k.classifier),
                    None => log::debug!("{} {} {} {} done", k.dataset, k.mechanism, k.preprocessor, k.classifier),
                }
                let appended = journal.lock().map_err(|_| ()).map(|mut j| j.append(&record));
                if let Ok(Err(e)) = appended {
                    log::error!("journal write failed: {e}");
                }
                record
            })
            .collect()
    });
    let computed = fresh.len();
    for r in fresh {
        done.insert((r.dataset.clone(), r.mechanism, r.preprocessor, r.classifier), r);
    }
    let records: Vec<ResultRecord> = keys
        .iter()
        .map(|k| done.remove(&owned(k)).expect("every key was run or reused"))
        .collect();
    write_results(&cfg.out_dir.join(RESULTS_FILE), &records)?;
    Ok(RunSummary {
        records,
        computed,
        reused,
    })
}
