//! Mechanisms that turn an equal-length dataset into a variable-length one.
//!
//! Two families are modelled: a change of sampling rate relative to the
//! underlying signal (uniform and non-uniform sampling) and a change of the
//! recording's start or end point (prefix, suffix, subsequence).

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed, sub_seed};
use crate::series::{interpolate_at, sample_at_interval, Dataset, TimeSeries};

/// Smallest step the non-uniform sampling walk may take.
pub const MIN_WALK_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    UniformSampling,
    NonUniformSampling,
    Prefix,
    Suffix,
    Subsequence,
}

impl Mechanism {
    pub const ALL: [Mechanism; 5] = [
        Mechanism::UniformSampling,
        Mechanism::NonUniformSampling,
        Mechanism::Prefix,
        Mechanism::Suffix,
        Mechanism::Subsequence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::UniformSampling => "uniform-sampling",
            Mechanism::NonUniformSampling => "nonuniform-sampling",
            Mechanism::Prefix => "prefix",
            Mechanism::Suffix => "suffix",
            Mechanism::Subsequence => "subsequence",
        }
    }

    /// Applies the mechanism to one series with a random draw.
    pub fn apply<R: Rng + ?Sized>(self, s: &TimeSeries, rng: &mut R, cfg: &GeneratorConfig) -> Result<TimeSeries> {
        match self {
            Mechanism::UniformSampling => gen_uniform_sampling(s, rng),
            Mechanism::NonUniformSampling => gen_nonuniform_sampling(s, rng, cfg.walk_std),
            Mechanism::Prefix => gen_prefix(s, rng),
            Mechanism::Suffix => gen_suffix(s, rng),
            Mechanism::Subsequence => gen_subsequence(s, rng),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "mechanism",
                name: s.to_owned(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Fraction of each split that gets modified; the rest passes through.
    pub modified_fraction: f64,
    /// Standard deviation of the non-uniform sampling step walk.
    pub walk_std: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            modified_fraction: 0.85,
            walk_std: 0.2,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.modified_fraction > 0.0 && self.modified_fraction <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "modified_fraction must lie in (0, 1], got {}",
                self.modified_fraction
            )));
        }
        if !(self.walk_std > 0.0 && self.walk_std.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "walk_std must be positive, got {}",
                self.walk_std
            )));
        }
        Ok(())
    }
}

fn require_len(s: &TimeSeries, min: usize, what: &str) -> Result<()> {
    if s.len() < min {
        return Err(Error::InvalidInput(format!(
            "{what} needs a series of length >= {min}, got {}",
            s.len()
        )));
    }
    Ok(())
}

/// Resamples `s` at a fixed interval of `L / new_len`.
pub fn uniform_sampling_to(s: &TimeSeries, new_len: usize) -> Result<TimeSeries> {
    if new_len == 0 || new_len > s.len() {
        return Err(Error::InvalidInput(format!(
            "sampled length must lie in 1..={}, got {new_len}",
            s.len()
        )));
    }
    Ok(sample_at_interval(s, s.len() as f64 / new_len as f64))
}

pub fn gen_uniform_sampling<R: Rng + ?Sized>(s: &TimeSeries, rng: &mut R) -> Result<TimeSeries> {
    require_len(s, 2, "uniform sampling")?;
    let new_len = rng.random_range(1..=s.len());
    uniform_sampling_to(s, new_len)
}

/// Random-walk resampling: the step starts at 1 and each emission draws the
/// next step from a normal centred on the previous one.
pub fn gen_nonuniform_sampling<R: Rng + ?Sized>(s: &TimeSeries, rng: &mut R, walk_std: f64) -> Result<TimeSeries> {
    require_len(s, 2, "non-uniform sampling")?;
    if !(walk_std >= 0.0 && walk_std.is_finite()) {
        return Err(Error::InvalidInput(format!("walk_std must be >= 0, got {walk_std}")));
    }
    let values = s.values();
    let last = (values.len() - 1) as f64;
    let mut out = vec![values[0]];
    let mut pos = 0.0;
    let mut step = 1.0;
    loop {
        step = if walk_std == 0.0 {
            step
        } else {
            Normal::new(step, walk_std)
                .expect("finite mean and std")
                .sample(rng)
        }
        .max(MIN_WALK_STEP);
        pos += step;
        if pos > last {
            break;
        }
        out.push(interpolate_at(values, pos));
    }
    Ok(s.with_values(out))
}

/// Keeps the first `L - removed` values.
pub fn take_prefix(s: &TimeSeries, removed: usize) -> Result<TimeSeries> {
    if removed >= s.len() {
        return Err(Error::InvalidInput(format!(
            "cannot remove {removed} of {} values",
            s.len()
        )));
    }
    Ok(s.with_values(s.values()[..s.len() - removed].to_vec()))
}

/// Drops the first `removed` values.
pub fn take_suffix(s: &TimeSeries, removed: usize) -> Result<TimeSeries> {
    if removed >= s.len() {
        return Err(Error::InvalidInput(format!(
            "cannot remove {removed} of {} values",
            s.len()
        )));
    }
    Ok(s.with_values(s.values()[removed..].to_vec()))
}

/// The contiguous run `s[offset .. offset + len]`.
pub fn take_subsequence(s: &TimeSeries, offset: usize, len: usize) -> Result<TimeSeries> {
    if len == 0 || offset + len > s.len() {
        return Err(Error::InvalidInput(format!(
            "subsequence [{offset}, {}) out of bounds for length {}",
            offset + len,
            s.len()
        )));
    }
    Ok(s.with_values(s.values()[offset..offset + len].to_vec()))
}

/// Removes a random-length suffix, leaving a prefix.
pub fn gen_prefix<R: Rng + ?Sized>(s: &TimeSeries, rng: &mut R) -> Result<TimeSeries> {
    require_len(s, 2, "prefix")?;
    let removed = rng.random_range(1..s.len());
    take_prefix(s, removed)
}

/// Removes a random-length prefix, leaving a suffix.
pub fn gen_suffix<R: Rng + ?Sized>(s: &TimeSeries, rng: &mut R) -> Result<TimeSeries> {
    require_len(s, 2, "suffix")?;
    let removed = rng.random_range(1..s.len());
    take_suffix(s, removed)
}

pub fn gen_subsequence<R: Rng + ?Sized>(s: &TimeSeries, rng: &mut R) -> Result<TimeSeries> {
    require_len(s, 3, "subsequence")?;
    let l = s.len();
    let len = rng.random_range(1..l);
    let offset = rng.random_range(0..=l - len);
    take_subsequence(s, offset, len)
}

fn modify_split(
    series: &[TimeSeries],
    mech: Mechanism,
    cfg: &GeneratorConfig,
    split_seed: u64,
) -> Result<Vec<TimeSeries>> {
    let n = series.len();
    let count = ((cfg.modified_fraction * n as f64).floor() as usize).min(n);
    let mut chosen = vec![false; n];
    let mut rng = rng_from_seed(split_seed);
    for i in index::sample(&mut rng, n, count) {
        chosen[i] = true;
    }
    series
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            if chosen[i] {
                let mut rng = rng_from_seed(sub_seed(split_seed, i as u64));
                mech.apply(s, &mut rng, cfg)
            } else {
                Ok(s.clone())
            }
        })
        .collect()
}

/// Applies `mech` to a random `modified_fraction` of each split.
///
/// Train and test are selected independently. The outcome depends only on
/// `(d, mech, cfg)`.
pub fn modify_dataset(d: &Dataset, mech: Mechanism, cfg: &GeneratorConfig) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&cfg.modified_fraction) || !cfg.walk_std.is_finite() || cfg.walk_std < 0.0 {
        return Err(Error::InvalidInput(format!("invalid generator config {cfg:?}")));
    }
    if !d.is_equal_length() {
        return Err(Error::UnequalLengths {
            min: d.min_len(),
            max: d.max_len(),
        });
    }
    if d.max_len() < 3 {
        return Err(Error::InvalidInput(format!(
            "dataset `{}` has series of length {}; at least 3 is required",
            d.name,
            d.max_len()
        )));
    }
    let train_seed = derive_seed(cfg.seed, &[mech.name(), "train"]);
    let test_seed = derive_seed(cfg.seed, &[mech.name(), "test"]);
    Ok(Dataset {
        name: d.name.clone(),
        train: modify_split(&d.train, mech, cfg, train_seed)?,
        test: modify_split(&d.test, mech, cfg, test_seed)?,
    })
}
