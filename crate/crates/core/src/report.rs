//! Rank tables and critical-difference diagrams from stored results.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{average_ranks, nemenyi_q, render_svg, render_text, AccuracyTable, CdResult, RankTable};
use crate::experiment::{applicable, applicable_pairs, Classifier, ResultRecord, Variation};
use crate::preprocess::PreprocessorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// One column per applicable (preprocessor, classifier) pair.
    AllPairs,
    /// One column per preprocessor, averaging accuracy over classifiers.
    ByPreprocessor,
    /// One column per classifier, averaging accuracy over preprocessors.
    ByClassifier,
    /// For each classifier, its preprocessors ranked against each other.
    Table1,
}

impl Scope {
    pub const ALL: [Scope; 4] = [Scope::AllPairs, Scope::ByPreprocessor, Scope::ByClassifier, Scope::Table1];

    pub fn name(self) -> &'static str {
        match self {
            Scope::AllPairs => "all-pairs",
            Scope::ByPreprocessor => "by-preprocessor",
            Scope::ByClassifier => "by-classifier",
            Scope::Table1 => "table1",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scope::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "report scope",
                name: s.to_string(),
            })
    }
}

pub fn pair_label(p: PreprocessorKind, c: Classifier) -> String {
    format!("{p}/{c}")
}

/// Accuracy of every successful record of `mechanism`, keyed by
/// (dataset, preprocessor, classifier).
fn accuracies(
    records: &[ResultRecord],
    mechanism: Variation,
) -> BTreeMap<(&str, PreprocessorKind, Classifier), f64> {
    records
        .iter()
        .filter(|r| r.mechanism == mechanism)
        .filter_map(|r| r.accuracy.filter(|_| r.error.is_none()).map(|a| ((r.dataset.as_str(), r.preprocessor, r.classifier), a)))
        .collect()
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Keeps rows with at least two present cells and columns present somewhere.
fn assemble(datasets: Vec<String>, columns: Vec<String>, cells: Vec<Vec<Option<f64>>>, what: &str) -> Result<Option<AccuracyTable>> {
    let keep_cols: Vec<usize> = (0..columns.len())
        .filter(|&j| cells.iter().any(|row| row[j].is_some()))
        .collect();
    let columns: Vec<String> = keep_cols.iter().map(|&j| columns[j].clone()).collect();
    let mut rows = Vec::new();
    let mut names = Vec::new();
    for (name, row) in datasets.into_iter().zip(cells) {
        let row: Vec<Option<f64>> = keep_cols.iter().map(|&j| row[j]).collect();
        if row.iter().flatten().count() >= 2 {
            rows.push(row);
            names.push(name);
        } else {
            log::warn!("{what}: dropping dataset `{name}` with fewer than two results");
        }
    }
    if columns.len() < 2 || rows.is_empty() {
        return Ok(None);
    }
    AccuracyTable::new(names, columns, rows).map(Some)
}

/// Accuracy table for `scope` (any scope but [`Scope::Table1`]) restricted to
/// one mechanism. `None` when fewer than two columns or no dataset remain.
pub fn accuracy_table(records: &[ResultRecord], mechanism: Variation, scope: Scope) -> Result<Option<AccuracyTable>> {
    let acc = accuracies(records, mechanism);
    let datasets: Vec<&str> = acc.keys().map(|k| k.0).collect::<BTreeSet<_>>().into_iter().collect();
    let what = format!("{scope} {mechanism}");
    match scope {
        Scope::AllPairs => {
            let pairs: Vec<(PreprocessorKind, Classifier)> = applicable_pairs();
            let cells = datasets
                .iter()
                .map(|&d| pairs.iter().map(|&(p, c)| acc.get(&(d, p, c)).copied()).collect())
                .collect();
            let columns = pairs.iter().map(|&(p, c)| pair_label(p, c)).collect();
            assemble(datasets.iter().map(|d| d.to_string()).collect(), columns, cells, &what)
        }
        Scope::ByPreprocessor => {
            let cells = datasets
                .iter()
                .map(|&d| {
                    PreprocessorKind::ALL
                        .iter()
                        .map(|&p| {
                            let v: Vec<f64> = Classifier::ALL.iter().filter_map(|&c| acc.get(&(d, p, c)).copied()).collect();
                            mean(&v)
                        })
                        .collect()
                })
                .collect();
            let columns = PreprocessorKind::ALL.iter().map(|p| p.to_string()).collect();
            assemble(datasets.iter().map(|d| d.to_string()).collect(), columns, cells, &what)
        }
        Scope::ByClassifier => {
            let cells = datasets
                .iter()
                .map(|&d| {
                    Classifier::ALL
                        .iter()
                        .map(|&c| {
                            let v: Vec<f64> = PreprocessorKind::ALL.iter().filter_map(|&p| acc.get(&(d, p, c)).copied()).collect();
                            mean(&v)
                        })
                        .collect()
                })
                .collect();
            let columns = Classifier::ALL.iter().map(|c| c.to_string()).collect();
            assemble(datasets.iter().map(|d| d.to_string()).collect(), columns, cells, &what)
        }
        Scope::Table1 => Err(Error::InvalidInput("table1 is built per classifier; use table1_rows".into())),
    }
}

/// Preprocessors paired with `classifier`, ranked against each other.
pub fn classifier_table(records: &[ResultRecord], mechanism: Variation, classifier: Classifier) -> Result<Option<AccuracyTable>> {
    let acc = accuracies(records, mechanism);
    let datasets: Vec<&str> = acc.keys().map(|k| k.0).collect::<BTreeSet<_>>().into_iter().collect();
    let pres: Vec<PreprocessorKind> = PreprocessorKind::ALL
        .into_iter()
        .filter(|&p| applicable(p, classifier))
        .collect();
    let cells = datasets
        .iter()
        .map(|&d| pres.iter().map(|&p| acc.get(&(d, p, classifier)).copied()).collect())
        .collect();
    assemble(
        datasets.iter().map(|d| d.to_string()).collect(),
        pres.iter().map(|p| p.to_string()).collect(),
        cells,
        &format!("table1 {mechanism} {classifier}"),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedColumn {
    pub column: String,
    pub avg_rank: f64,
    pub effective_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramSummary {
    pub scope: Scope,
    pub mechanism: Variation,
    pub k: usize,
    pub n: usize,
    pub alpha: f64,
    pub q_alpha: f64,
    pub cd: f64,
    /// Friedman chi-square over complete rows, for information.
    pub friedman_chi2: Option<f64>,
    pub friedman_rows: usize,
    /// Best first.
    pub ranks: Vec<RankedColumn>,
    pub groups: Vec<Vec<String>>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub classifier: Classifier,
    pub mechanism: Variation,
    pub preprocessor: String,
    pub avg_rank: f64,
    pub effective_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOutput {
    pub diagrams: Vec<DiagramSummary>,
    pub table1: Vec<Table1Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub alpha: f64,
    pub scopes: Vec<Scope>,
    pub out_dir: PathBuf,
}

fn ranked_columns(r: &RankTable) -> Vec<RankedColumn> {
    r.order()
        .into_iter()
        .map(|i| RankedColumn {
            column: r.columns[i].clone(),
            avg_rank: r.average_rank[i],
            effective_n: r.effective_n[i],
        })
        .collect()
}

fn write_diagram(table: &AccuracyTable, scope: Scope, mechanism: Variation, opts: &ReportOptions) -> Result<DiagramSummary> {
    let ranks = average_ranks(table)?;
    let cd = CdResult::compute(&ranks, opts.alpha)?;
    let stem = format!("{scope}_{mechanism}");
    let title = format!("{scope}, {mechanism} (N={})", ranks.n());
    let csv_path = opts.out_dir.join(format!("{stem}.csv"));
    let svg_path = opts.out_dir.join(format!("{stem}.svg"));
    let txt_path = opts.out_dir.join(format!("{stem}.txt"));
    ranks.write_csv(fs::File::create(&csv_path)?)?;
    fs::write(&svg_path, render_svg(&ranks, &cd, &title))?;
    fs::write(&txt_path, render_text(&ranks, &cd, &title))?;
    let friedman = ranks.friedman_statistic();
    Ok(DiagramSummary {
        scope,
        mechanism,
        k: ranks.k(),
        n: ranks.n(),
        alpha: opts.alpha,
        q_alpha: cd.q_alpha,
        cd: cd.cd,
        friedman_chi2: friedman.map(|f| f.0),
        friedman_rows: friedman.map_or(0, |f| f.1),
        ranks: ranked_columns(&ranks),
        groups: cd
            .groups
            .iter()
            .map(|g| g.iter().map(|&i| ranks.columns[i].clone()).collect())
            .collect(),
        files: vec![csv_path, svg_path, txt_path],
    })
}

fn table1_text(rows: &[Table1Row], mechanisms: &[Variation]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "average rank of each preprocessor per classifier (lower is better)");
    for c in Classifier::ALL {
        let mine: Vec<&Table1Row> = rows.iter().filter(|r| r.classifier == c).collect();
        if mine.is_empty() {
            continue;
        }
        let _ = writeln!(s, "\n{c}");
        let pres: Vec<&str> = mine
            .iter()
            .map(|r| r.preprocessor.as_str())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let _ = write!(s, "  {:<22}", "mechanism");
        for p in &pres {
            let _ = write!(s, "{p:>22}");
        }
        s.push('\n');
        for m in mechanisms {
            let _ = write!(s, "  {:<22}", m.name());
            for p in &pres {
                match mine.iter().find(|r| r.mechanism == *m && r.preprocessor == *p) {
                    Some(r) => {
                        let _ = write!(s, "{:>22.3}", r.avg_rank);
                    }
                    None => {
                        let _ = write!(s, "{:>22}", "");
                    }
                }
            }
            s.push('\n');
        }
    }
    s
}

/// Writes one rank CSV, SVG and text diagram per (scope, mechanism), the
/// per-classifier preprocessor table, and `summary.json` describing them.
pub fn report(records: &[ResultRecord], opts: &ReportOptions) -> Result<ReportOutput> {
    nemenyi_q(2, opts.alpha)?;
    fs::create_dir_all(&opts.out_dir)?;
    let mechanisms: Vec<Variation> = records
        .iter()
        .map(|r| r.mechanism)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut diagrams = Vec::new();
    let mut table1 = Vec::new();
    for &scope in &opts.scopes {
        for &m in &mechanisms {
            if scope == Scope::Table1 {
                for c in Classifier::ALL {
                    if let Some(t) = classifier_table(records, m, c)? {
                        let ranks = average_ranks(&t)?;
                        table1.extend(ranked_columns(&ranks).into_iter().map(|rc| Table1Row {
                            classifier: c,
                            mechanism: m,
                            preprocessor: rc.column,
                            avg_rank: rc.avg_rank,
                            effective_n: rc.effective_n,
                        }));
                    }
                }
                continue;
            }
            match accuracy_table(records, m, scope)? {
                Some(t) => diagrams.push(write_diagram(&t, scope, m, opts)?),
                None => log::warn!("{scope} {m}: fewer than two comparable columns, no diagram"),
            }
        }
    }
    if opts.scopes.contains(&Scope::Table1) {
        let mut w = csv::Writer::from_path(opts.out_dir.join("table1.csv"))?;
        for r in &table1 {
            w.serialize(r)?;
        }
        w.flush()?;
        fs::write(opts.out_dir.join("table1.txt"), table1_text(&table1, &mechanisms))?;
    }
    let out = ReportOutput { diagrams, table1 };
    fs::write(opts.out_dir.join("summary.json"), serde_json::to_string_pretty(&out)?)?;
    Ok(out)
}

/// Reads `results.csv` from `path`, or from `path/results.csv` when `path`
/// is a directory.
pub fn load_records(path: &Path) -> Result<Vec<ResultRecord>> {
    let file = if path.is_dir() {
        path.join(crate::experiment::RESULTS_FILE)
    } else {
        path.to_path_buf()
    };
    crate::experiment::read_results(&file)
}
