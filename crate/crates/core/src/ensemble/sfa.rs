//! Symbolic Fourier Approximation: truncated DFT of sliding windows,
//! discretised by per-coefficient equi-depth bins, counted into histograms.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::DEGENERATE_STD;

/// Per-coefficient breakpoints learnt from training windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McbBins {
    alphabet_size: usize,
    breakpoints: Vec<Vec<f64>>,
}

impl McbBins {
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn columns(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self, column: usize) -> &[f64] {
        &self.breakpoints[column]
    }

    /// Keeps only the first `columns` columns.
    pub fn truncated(mut self, columns: usize) -> Self {
        self.breakpoints.truncate(columns);
        self
    }

    /// Index of the first breakpoint exceeding `value`.
    pub fn symbol(&self, column: usize, value: f64) -> u8 {
        self.breakpoints[column].partition_point(|&b| b <= value) as u8
    }
}

/// Fits `alphabet_size - 1` equi-depth breakpoints per column.
///
/// Breakpoint `j` sits midway between the sorted values at ranks
/// `j*n/a - 1` and `j*n/a`, so each symbol receives an equal share of the
/// training values.
pub fn fit_mcb_bins(rows: &[Vec<f64>], alphabet_size: usize) -> Result<McbBins> {
    if alphabet_size < 2 {
        return Err(Error::InvalidInput(format!("alphabet size must be >= 2, got {alphabet_size}")));
    }
    if rows.len() < alphabet_size {
        return Err(Error::InvalidInput(format!(
            "{} training rows cannot fill an alphabet of {alphabet_size}",
            rows.len()
        )));
    }
    let columns = rows[0].len();
    if rows.iter().any(|r| r.len() != columns) {
        return Err(Error::InvalidInput("ragged coefficient matrix".into()));
    }
    let n = rows.len();
    let breakpoints = (0..columns)
        .map(|c| {
            let mut col: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            col.sort_by(f64::total_cmp);
            (1..alphabet_size)
                .map(|j| {
                    let idx = (j * n / alphabet_size).max(1);
                    0.5 * (col[idx - 1] + col[idx])
                })
                .collect()
        })
        .collect();
    Ok(McbBins {
        alphabet_size,
        breakpoints,
    })
}

/// First DFT coefficient index that is kept.
fn first_coefficient(norm_mean: bool) -> usize {
    usize::from(norm_mean)
}

/// Number of real values (real/imaginary parts) a window of size `window`
/// can supply without repeating a coefficient.
pub fn available_values(window: usize, norm_mean: bool) -> usize {
    2 * (window / 2 + 1).saturating_sub(first_coefficient(norm_mean))
}

/// Precomputed DFT basis for one window size.
#[derive(Debug, Clone)]
pub struct DftBasis {
    window: usize,
    norm_mean: bool,
    // cos/sin per retained coefficient, each of length `window`
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl DftBasis {
    /// Basis producing `n_values` reals (n_values/2 complex coefficients).
    pub fn new(window: usize, n_values: usize, norm_mean: bool) -> Self {
        let start = first_coefficient(norm_mean);
        let (mut cos, mut sin) = (Vec::new(), Vec::new());
        for k in start..start + n_values / 2 {
            let w = 2.0 * PI * k as f64 / window as f64;
            cos.push((0..window).map(|t| (w * t as f64).cos()).collect());
            sin.push((0..window).map(|t| (w * t as f64).sin()).collect());
        }
        Self {
            window,
            norm_mean,
            cos,
            sin,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn n_values(&self) -> usize {
        2 * self.cos.len()
    }

    /// Normalizes one window and returns interleaved (re, im) coefficients.
    ///
    /// The window is divided by its standard deviation when that is not
    /// degenerate, and its mean is removed only when `norm_mean` is set.
    pub fn coefficients(&self, window: &[f64]) -> Vec<f64> {
        debug_assert_eq!(window.len(), self.window);
        let n = window.len() as f64;
        let mean = window.iter().sum::<f64>() / n;
        let std = (window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        let scale = if std < DEGENERATE_STD { 1.0 } else { 1.0 / std };
        let shift = if self.norm_mean { mean } else { 0.0 };
        let normed: Vec<f64> = window.iter().map(|v| (v - shift) * scale).collect();
        let mut out = Vec::with_capacity(self.n_values());
        for (c, s) in self.cos.iter().zip(&self.sin) {
            let re: f64 = normed.iter().zip(c).map(|(x, b)| x * b).sum();
            let im: f64 = -normed.iter().zip(s).map(|(x, b)| x * b).sum::<f64>();
            out.push(re);
            out.push(im);
        }
        out
    }

    /// Coefficients of every stride-1 window of `series`.
    pub fn sliding(&self, series: &[f64]) -> Vec<Vec<f64>> {
        series.windows(self.window).map(|w| self.coefficients(w)).collect()
    }
}

/// Packs the first `word_len` symbols of `coeffs` into a base-`alphabet` code.
pub fn encode_word(coeffs: &[f64], word_len: usize, bins: &McbBins) -> u64 {
    let base = bins.alphabet_size() as u64;
    coeffs[..word_len]
        .iter()
        .enumerate()
        .rev()
        .fold(0u64, |acc, (c, &v)| acc * base + u64::from(bins.symbol(c, v)))
}

/// Bag of SFA words.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BossHistogram {
    pub counts: BTreeMap<u64, u32>,
}

impl BossHistogram {
    /// Counts words with numerosity reduction: a run of identical
    /// consecutive words counts once.
    pub fn from_words<I: IntoIterator<Item = u64>>(words: I) -> Self {
        let mut counts = BTreeMap::new();
        let mut last = None;
        for w in words {
            if last != Some(w) {
                *counts.entry(w).or_insert(0) += 1;
                last = Some(w);
            }
        }
        Self { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }
}

/// Histogram of the SFA words of all windows of `series`.
pub fn sfa_transform(
    series: &[f64],
    window: usize,
    word_len: usize,
    bins: &McbBins,
    norm_mean: bool,
) -> Result<BossHistogram> {
    if window == 0 || window > series.len() {
        return Err(Error::InvalidInput(format!(
            "window {window} does not fit a series of length {}",
            series.len()
        )));
    }
    if word_len > bins.columns() {
        return Err(Error::InvalidInput(format!(
            "word length {word_len} exceeds the {} fitted bin columns",
            bins.columns()
        )));
    }
    let basis = DftBasis::new(window, word_len + word_len % 2, norm_mean);
    Ok(histogram_from_coefficients(&basis.sliding(series), word_len, bins))
}

pub(crate) fn histogram_from_coefficients(coeffs: &[Vec<f64>], word_len: usize, bins: &McbBins) -> BossHistogram {
    BossHistogram::from_words(coeffs.iter().map(|c| encode_word(c, word_len, bins)))
}

/// Sum over words of `a` of the squared count difference; words only in
/// `b` are ignored.
pub fn boss_distance(a: &BossHistogram, b: &BossHistogram) -> f64 {
    a.counts
        .iter()
        .map(|(w, &ca)| {
            let d = f64::from(ca) - f64::from(b.counts.get(w).copied().unwrap_or(0));
            d * d
        })
        .sum()
}
