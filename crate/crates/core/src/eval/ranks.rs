use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracies per dataset (rows) and compared method (columns). `None`
/// marks a combination that does not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTable {
    pub datasets: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl AccuracyTable {
    pub fn new(datasets: Vec<String>, columns: Vec<String>, cells: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if cells.len() != datasets.len() || cells.iter().any(|r| r.len() != columns.len()) {
            return Err(Error::InvalidInput("accuracy table shape mismatch".into()));
        }
        for (row, name) in cells.iter().zip(&datasets) {
            let present = row.iter().flatten().count();
            if present < 2 {
                return Err(Error::TooFewCells { present });
            }
            if let Some(bad) = row.iter().flatten().find(|a| !(0.0..=1.0).contains(*a)) {
                return Err(Error::InvalidInput(format!("accuracy {bad} for `{name}` is outside [0, 1]")));
            }
        }
        Ok(Self {
            datasets,
            columns,
            cells,
        })
    }
}

/// Ranks one row: 1 is the highest accuracy, ties share the mean of their
/// positions, absent cells get no rank.
pub fn rank_within_dataset(accuracies: &[Option<f64>]) -> Result<Vec<Option<f64>>> {
    let mut present: Vec<(usize, f64)> = accuracies
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.map(|a| (i, a)))
        .collect();
    if present.len() < 2 {
        return Err(Error::TooFewCells { present: present.len() });
    }
    present.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut ranks = vec![None; accuracies.len()];
    let mut start = 0;
    while start < present.len() {
        let mut end = start;
        while end + 1 < present.len() && present[end + 1].1 == present[start].1 {
            end += 1;
        }
        // positions start+1 ..= end+1 share their mean
        let shared = (start + end) as f64 / 2.0 + 1.0;
        for &(col, _) in &present[start..=end] {
            ranks[col] = Some(shared);
        }
        start = end + 1;
    }
    Ok(ranks)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub columns: Vec<String>,
    pub datasets: Vec<String>,
    pub ranks: Vec<Vec<Option<f64>>>,
    pub average_rank: Vec<f64>,
    /// Number of datasets in which each column was ranked.
    pub effective_n: Vec<usize>,
}

impl RankTable {
    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn n(&self) -> usize {
        self.datasets.len()
    }

    /// Column indices from best (lowest) to worst average rank; ties keep
    /// column order.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.k()).collect();
        idx.sort_by(|&a, &b| self.average_rank[a].total_cmp(&self.average_rank[b]));
        idx
    }

    /// Writes `column,avg_rank,effective_n` rows, best first.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["column", "avg_rank", "effective_n"])?;
        for i in self.order() {
            w.write_record([
                self.columns[i].clone(),
                format!("{:.6}", self.average_rank[i]),
                self.effective_n[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Friedman chi-square over the rows where every column is present, with
    /// the number of such rows. Informational only.
    pub fn friedman_statistic(&self) -> Option<(f64, usize)> {
        let full: Vec<Vec<f64>> = self
            .ranks
            .iter()
            .filter_map(|r| r.iter().copied().collect::<Option<Vec<f64>>>())
            .collect();
        if full.is_empty() {
            return None;
        }
        let (n, k) = (full.len() as f64, self.k() as f64);
        let sum_sq: f64 = (0..self.k())
            .map(|j| {
                let mean = full.iter().map(|r| r[j]).sum::<f64>() / n;
                mean * mean
            })
            .sum();
        let chi2 = 12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0);
        Some((chi2, full.len()))
    }
}

/// Ranks every row and averages each column over the rows where it is present.
pub fn average_ranks(t: &AccuracyTable) -> Result<RankTable> {
    let ranks: Vec<Vec<Option<f64>>> = t.cells.iter().map(|r| rank_within_dataset(r)).collect::<Result<_>>()?;
    let k = t.columns.len();
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for row in &ranks {
        for (j, r) in row.iter().enumerate() {
            if let Some(r) = r {
                sums[j] += r;
                counts[j] += 1;
            }
        }
    }
    let average_rank = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
        .collect();
    Ok(RankTable {
        columns: t.columns.clone(),
        datasets: t.datasets.clone(),
        ranks,
        average_rank,
        effective_n: counts,
    })
}
