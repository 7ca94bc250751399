//! Length-equalization techniques applied dataset-wide before classification.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed, sub_seed};
use crate::series::{resample_linear, z_normalize, Dataset, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreprocessorKind {
    #[serde(rename = "none")]
    NoProcessing,
    UniformScaling,
    SuffixNoise,
    PrefixSuffixNoise,
    PrefixSuffixZero,
}

impl PreprocessorKind {
    pub const ALL: [PreprocessorKind; 5] = [
        PreprocessorKind::NoProcessing,
        PreprocessorKind::UniformScaling,
        PreprocessorKind::SuffixNoise,
        PreprocessorKind::PrefixSuffixNoise,
        PreprocessorKind::PrefixSuffixZero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PreprocessorKind::NoProcessing => "none",
            PreprocessorKind::UniformScaling => "uniform-scaling",
            PreprocessorKind::SuffixNoise => "suffix-noise",
            PreprocessorKind::PrefixSuffixNoise => "prefix-suffix-noise",
            PreprocessorKind::PrefixSuffixZero => "prefix-suffix-zero",
        }
    }

    /// True when the output series all share one length.
    pub fn equalizes_length(self) -> bool {
        matches!(
            self,
            PreprocessorKind::UniformScaling | PreprocessorKind::SuffixNoise | PreprocessorKind::PrefixSuffixNoise
        )
    }
}

impl fmt::Display for PreprocessorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PreprocessorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PreprocessorKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "preprocessor",
                name: s.to_owned(),
            })
    }
}

/// Where z-normalization happens relative to the length transform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizeOrder {
    /// Equalize lengths first, then z-normalize every series.
    #[default]
    ProcessThenNormalize,
    /// z-normalize the raw series, then equalize; padding is not renormalized.
    NormalizeThenProcess,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub kind: PreprocessorKind,
    /// Padding noise is drawn uniformly from `[0, noise_amplitude)`.
    pub noise_amplitude: f64,
    pub noise_seed: u64,
    #[serde(default)]
    pub order: NormalizeOrder,
}

impl Preprocessor {
    pub fn new(kind: PreprocessorKind, noise_seed: u64) -> Self {
        Self {
            kind,
            noise_amplitude: 1e-3,
            noise_seed,
            order: NormalizeOrder::default(),
        }
    }

    /// Equalizes (per `kind`) and z-normalizes every series of `d`.
    ///
    /// The common target length is the maximum over train and test.
    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        if !(self.noise_amplitude > 0.0 && self.noise_amplitude.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "noise amplitude must be positive, got {}",
                self.noise_amplitude
            )));
        }
        let target = d.max_len();
        let train_seed = derive_seed(self.noise_seed, &[self.kind.name(), "train"]);
        let test_seed = derive_seed(self.noise_seed, &[self.kind.name(), "test"]);
        Ok(Dataset {
            name: d.name.clone(),
            train: self.apply_split(&d.train, target, train_seed),
            test: self.apply_split(&d.test, target, test_seed),
        })
    }

    fn apply_split(&self, series: &[TimeSeries], target: usize, split_seed: u64) -> Vec<TimeSeries> {
        series
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let mut rng = rng_from_seed(sub_seed(split_seed, i as u64));
                match self.order {
                    NormalizeOrder::ProcessThenNormalize => z_normalize(&self.transform(s, target, &mut rng)),
                    NormalizeOrder::NormalizeThenProcess => self.transform(&z_normalize(s), target, &mut rng),
                }
            })
            .collect()
    }

    fn transform<R: Rng + ?Sized>(&self, s: &TimeSeries, target: usize, rng: &mut R) -> TimeSeries {
        let amp = self.noise_amplitude;
        match self.kind {
            PreprocessorKind::NoProcessing => s.clone(),
            PreprocessorKind::UniformScaling => resample_linear(s, target),
            PreprocessorKind::SuffixNoise => pad_suffix_noise(s, target, amp, rng),
            PreprocessorKind::PrefixSuffixNoise => pad_prefix_suffix_noise(s, target, amp, rng),
            PreprocessorKind::PrefixSuffixZero => pad_prefix_suffix_zero(s),
        }
    }
}

/// Stretches `s` to `target` points by linear interpolation.
pub fn rescale_uniform(s: &TimeSeries, target: usize) -> Result<TimeSeries> {
    if s.len() > target {
        return Err(Error::InvalidInput(format!(
            "cannot rescale a length-{} series down to {target}",
            s.len()
        )));
    }
    Ok(resample_linear(s, target))
}

fn noise<R: Rng + ?Sized>(n: usize, amp: f64, rng: &mut R) -> impl Iterator<Item = f64> + '_ {
    (0..n).map(move |_| rng.random::<f64>() * amp)
}

/// Appends `target - L` noise values drawn from `[0, amp)`.
pub fn pad_suffix_noise<R: Rng + ?Sized>(s: &TimeSeries, target: usize, amp: f64, rng: &mut R) -> TimeSeries {
    let pad = target.saturating_sub(s.len());
    let mut v = s.values().to_vec();
    v.extend(noise(pad, amp, rng));
    s.with_values(v)
}

/// Centres `s` between noise: `floor(d/2)` values before, `ceil(d/2)` after.
pub fn pad_prefix_suffix_noise<R: Rng + ?Sized>(s: &TimeSeries, target: usize, amp: f64, rng: &mut R) -> TimeSeries {
    let pad = target.saturating_sub(s.len());
    let before = pad / 2;
    let mut v: Vec<f64> = noise(before, amp, rng).collect();
    v.extend_from_slice(s.values());
    v.extend(noise(pad - before, amp, rng));
    s.with_values(v)
}

/// `[0] ++ s ++ [0]`; lengths stay unequal across a dataset.
pub fn pad_prefix_suffix_zero(s: &TimeSeries) -> TimeSeries {
    let mut v = Vec::with_capacity(s.len() + 2);
    v.push(0.0);
    v.extend_from_slice(s.values());
    v.push(0.0);
    s.with_values(v)
}
