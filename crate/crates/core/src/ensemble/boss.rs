//! Bag-of-SFA-Symbols ensemble.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sfa::{available_values, boss_distance, fit_mcb_bins, histogram_from_coefficients, BossHistogram, DftBasis, McbBins};
use super::vote;
use crate::error::{Error, Result};
use crate::series::{Label, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfaConfig {
    pub word_length_candidates: Vec<usize>,
    pub alphabet_size: usize,
    pub min_window: usize,
    /// Members whose accuracy reaches this share of the best are kept.
    pub ensemble_retention_factor: f64,
    /// Upper bound on the number of window sizes tried.
    pub max_window_sizes: usize,
}

impl Default for SfaConfig {
    fn default() -> Self {
        Self {
            word_length_candidates: vec![16, 14, 12, 10, 8],
            alphabet_size: 4,
            min_window: 10,
            ensemble_retention_factor: 0.92,
            max_window_sizes: 50,
        }
    }
}

impl SfaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alphabet_size < 2 || self.alphabet_size > 256 {
            return Err(Error::InvalidInput(format!(
                "alphabet size must lie in 2..=256, got {}",
                self.alphabet_size
            )));
        }
        if self.word_length_candidates.is_empty()
            || self.word_length_candidates.iter().any(|&l| l < 2 || l % 2 != 0)
        {
            return Err(Error::InvalidInput(format!(
                "word lengths must be even and >= 2, got {:?}",
                self.word_length_candidates
            )));
        }
        let longest = *self.word_length_candidates.iter().max().unwrap_or(&0) as f64;
        if longest * (self.alphabet_size as f64).log2().ceil() > 64.0 {
            return Err(Error::InvalidInput("words do not fit in 64 bits".into()));
        }
        if !(self.ensemble_retention_factor > 0.0 && self.ensemble_retention_factor <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "retention factor must lie in (0, 1], got {}",
                self.ensemble_retention_factor
            )));
        }
        if self.min_window == 0 || self.max_window_sizes == 0 {
            return Err(Error::InvalidInput("min_window and max_window_sizes must be positive".into()));
        }
        Ok(())
    }
}

/// One fitted (window, word length, mean-normalization) configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BossMember {
    pub window: usize,
    pub word_len: usize,
    pub norm_mean: bool,
    pub bins: McbBins,
    pub train_histograms: Vec<BossHistogram>,
    /// Leave-one-out training accuracy.
    pub accuracy: f64,
}

impl BossMember {
    fn histogram(&self, series: &[f64]) -> BossHistogram {
        let basis = DftBasis::new(self.window, self.word_len, self.norm_mean);
        histogram_from_coefficients(&basis.sliding(series), self.word_len, &self.bins)
    }

    /// Index of the training histogram nearest to `h` (lowest index on ties).
    fn nearest(&self, h: &BossHistogram, skip: Option<usize>) -> Option<usize> {
        nearest_histogram(h, &self.train_histograms, skip)
    }
}

fn nearest_histogram(h: &BossHistogram, train: &[BossHistogram], skip: Option<usize>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, t) in train.iter().enumerate() {
        if Some(j) == skip {
            continue;
        }
        let d = boss_distance(h, t);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    best.map(|(j, _)| j)
}

fn loo_accuracy(hists: &[BossHistogram], labels: &[Label]) -> f64 {
    if hists.len() < 2 {
        return 0.0;
    }
    let hits = (0..hists.len())
        .filter(|&i| nearest_histogram(&hists[i], hists, Some(i)).is_some_and(|j| labels[j] == labels[i]))
        .count();
    hits as f64 / hists.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BossModel {
    pub config: SfaConfig,
    pub labels: Vec<Label>,
    pub members: Vec<BossMember>,
}

/// Up to `max` evenly spaced window sizes in `min..=max_len`.
pub fn window_grid(min: usize, max_len: usize, max: usize) -> Vec<usize> {
    let min = min.min(max_len);
    let count = max_len - min + 1;
    if count <= max {
        return (min..=max_len).collect();
    }
    if max == 1 {
        return vec![min];
    }
    let span = (max_len - min) as f64;
    let mut sizes: Vec<usize> = (0..max)
        .map(|i| min + (i as f64 * span / (max - 1) as f64).round() as usize)
        .collect();
    sizes.dedup();
    sizes
}

fn word_lengths(cfg: &SfaConfig, window: usize, norm_mean: bool) -> Vec<usize> {
    let available = available_values(window, norm_mean);
    let mut lens: Vec<usize> = cfg
        .word_length_candidates
        .iter()
        .copied()
        .filter(|&l| l <= available)
        .collect();
    if lens.is_empty() && available >= 2 {
        lens.push(available);
    }
    lens
}

fn fit_member(
    train: &[TimeSeries],
    labels: &[Label],
    cfg: &SfaConfig,
    window: usize,
    norm_mean: bool,
) -> Result<Option<BossMember>> {
    let lens = word_lengths(cfg, window, norm_mean);
    let Some(&longest) = lens.iter().max() else {
        return Ok(None);
    };
    let basis = DftBasis::new(window, longest, norm_mean);
    let per_series: Vec<Vec<Vec<f64>>> = train.iter().map(|s| basis.sliding(s.values())).collect();
    let all_rows: Vec<Vec<f64>> = per_series.iter().flatten().cloned().collect();
    if all_rows.len() < cfg.alphabet_size {
        return Ok(None);
    }
    let bins = fit_mcb_bins(&all_rows, cfg.alphabet_size)?;

    let mut best: Option<(usize, f64, Vec<BossHistogram>)> = None;
    for &len in &lens {
        let hists: Vec<BossHistogram> = per_series
            .iter()
            .map(|c| histogram_from_coefficients(c, len, &bins))
            .collect();
        let acc = loo_accuracy(&hists, labels);
        if best.as_ref().is_none_or(|(_, b, _)| acc > *b) {
            best = Some((len, acc, hists));
        }
    }
    let (word_len, accuracy, train_histograms) = best.expect("at least one word length");
    Ok(Some(BossMember {
        window,
        word_len,
        norm_mean,
        bins: bins.truncated(word_len),
        train_histograms,
        accuracy,
    }))
}

impl BossModel {
    /// Fits every (window size, mean-normalization) member, picks each one's
    /// word length by leave-one-out accuracy and keeps the members within the
    /// retention factor of the best.
    pub fn fit(train: &[TimeSeries], cfg: &SfaConfig) -> Result<Self> {
        cfg.validate()?;
        if train.is_empty() {
            return Err(Error::InvalidInput("BOSS needs training data".into()));
        }
        let len = train[0].len();
        if let Some(other) = train.iter().find(|s| s.len() != len) {
            return Err(Error::UnequalLengths {
                min: len.min(other.len()),
                max: len.max(other.len()),
            });
        }
        let labels: Vec<Label> = train.iter().map(|s| s.label().clone()).collect();
        let grid: Vec<(usize, bool)> = window_grid(cfg.min_window, len, cfg.max_window_sizes)
            .into_iter()
            .flat_map(|w| [(w, true), (w, false)])
            .collect();
        let fitted: Vec<Option<BossMember>> = grid
            .par_iter()
            .map(|&(w, norm_mean)| fit_member(train, &labels, cfg, w, norm_mean))
            .collect::<Result<_>>()?;
        let mut members: Vec<BossMember> = fitted.into_iter().flatten().collect();
        let best = members.iter().map(|m| m.accuracy).fold(f64::NEG_INFINITY, f64::max);
        members.retain(|m| m.accuracy >= cfg.ensemble_retention_factor * best);
        if members.is_empty() {
            return Err(Error::InvalidInput(format!(
                "no BOSS member could be fitted on series of length {len}"
            )));
        }
        Ok(Self {
            config: cfg.clone(),
            labels,
            members,
        })
    }

    /// Majority vote of the members' 1-NN predictions. Members whose window
    /// exceeds the query abstain; ties go to the earliest member's label.
    pub fn predict(&self, query: &TimeSeries) -> Result<Label> {
        let votes: Vec<&Label> = self
            .members
            .iter()
            .filter(|m| m.window <= query.len())
            .filter_map(|m| m.nearest(&m.histogram(query.values()), None))
            .map(|j| &self.labels[j])
            .collect();
        vote::majority_first_wins(&votes)
            .cloned()
            .ok_or(Error::AllMembersAbstained { len: query.len() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: Vec<f64>, l: &str) -> TimeSeries {
        TimeSeries::new(v, l).unwrap()
    }

    fn shapes(n_per_class: usize, len: usize) -> Vec<TimeSeries> {
        let mut out = Vec::new();
        for i in 0..n_per_class {
            let phase = i as f64 * 0.05;
            out.push(ts(
                (0..len).map(|t| (t as f64 * 0.4 + phase).sin()).collect(),
                "sine",
            ));
            out.push(ts(
                (0..len)
                    .map(|t| if (t / 6 + i) % 2 == 0 { 1.0 } else { -1.0 })
                    .collect(),
                "square",
            ));
        }
        out
    }

    #[test]
    fn window_grid_caps_and_spans() {
        assert_eq!(window_grid(10, 14, 50), vec![10, 11, 12, 13, 14]);
        let g = window_grid(10, 300, 50);
        assert_eq!(g.len(), 50);
        assert_eq!((g[0], g[49]), (10, 300));
        assert_eq!(window_grid(10, 6, 50), vec![6]);
    }

    #[test]
    fn separates_shapes_and_is_deterministic() {
        let train = shapes(3, 40);
        let model = BossModel::fit(&train, &SfaConfig::default()).unwrap();
        for s in &train {
            assert_eq!(&model.predict(s).unwrap(), s.label());
        }
        let again = BossModel::fit(&train, &SfaConfig::default()).unwrap();
        assert_eq!(model, again);
        let best = model.members.iter().map(|m| m.accuracy).fold(0.0, f64::max);
        assert!(model.members.iter().all(|m| m.accuracy >= 0.92 * best));
    }

    #[test]
    fn rejects_unequal_lengths() {
        let train = vec![ts(vec![1.0; 12], "a"), ts(vec![1.0; 13], "b")];
        assert!(matches!(
            BossModel::fit(&train, &SfaConfig::default()),
            Err(Error::UnequalLengths { .. })
        ));
    }

    #[test]
    fn short_queries_abstain() {
        let train = shapes(2, 30);
        let model = BossModel::fit(&train, &SfaConfig::default()).unwrap();
        let min_window = model.members.iter().map(|m| m.window).min().unwrap();
        let tiny = ts(vec![0.0; min_window - 1], "?");
        assert!(matches!(model.predict(&tiny), Err(Error::AllMembersAbstained { .. })));
    }

    #[test]
    fn model_round_trips_through_json() {
        let train = shapes(2, 24);
        let model = BossModel::fit(&train, &SfaConfig::default()).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: BossModel = serde_json::from_str(&json).unwrap();
        for s in &train {
            assert_eq!(model.predict(s).unwrap(), back.predict(s).unwrap());
        }
    }

    #[test]
    fn config_validation() {
        for cfg in [
            SfaConfig { word_length_candidates: vec![7], ..SfaConfig::default() },
            SfaConfig { alphabet_size: 1, ..SfaConfig::default() },
            SfaConfig { ensemble_retention_factor: 0.0, ..SfaConfig::default() },
        ] {
            assert!(cfg.validate().is_err());
        }
    }
}
