//! Series and dataset types plus the normalization and interpolation
//! primitives every other module builds on.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard deviations below this are treated as a constant series.
pub const DEGENERATE_STD: f64 = 1e-12;

/// Opaque class identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// A labelled, univariate, index-ordered series of at least one value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: Label,
}

impl TimeSeries {
    /// Builds a series, rejecting empty or non-finite input.
    pub fn new(values: Vec<f64>, label: impl Into<Label>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("a series needs at least one value".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value {} at index {i}",
                values[i]
            )));
        }
        Ok(Self {
            values,
            label: label.into(),
        })
    }

    /// Same label, new values. The values must satisfy the series invariants.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            values,
            label: self.label.clone(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// A named train/test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub train: Vec<TimeSeries>,
    pub test: Vec<TimeSeries>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, train: Vec<TimeSeries>, test: Vec<TimeSeries>) -> Result<Self> {
        let name = name.into();
        if train.is_empty() || test.is_empty() {
            return Err(Error::InvalidInput(format!(
                "dataset `{name}` needs non-empty train and test splits"
            )));
        }
        Ok(Self { name, train, test })
    }

    pub fn iter(&self) -> impl Iterator<Item = &TimeSeries> {
        self.train.iter().chain(self.test.iter())
    }

    pub fn max_len(&self) -> usize {
        self.iter().map(TimeSeries::len).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> usize {
        self.iter().map(TimeSeries::len).min().unwrap_or(0)
    }

    pub fn is_equal_length(&self) -> bool {
        self.min_len() == self.max_len()
    }

    /// Test labels that never occur in the training split.
    pub fn unseen_test_labels(&self) -> Vec<Label> {
        let known: BTreeSet<&Label> = self.train.iter().map(TimeSeries::label).collect();
        let unseen: BTreeSet<&Label> = self
            .test
            .iter()
            .map(TimeSeries::label)
            .filter(|l| !known.contains(l))
            .collect();
        unseen.into_iter().cloned().collect()
    }

    /// Applies `f` to every series of both splits.
    pub fn map_series<F>(&self, mut f: F) -> Dataset
    where
        F: FnMut(&TimeSeries) -> TimeSeries,
    {
        Dataset {
            name: self.name.clone(),
            train: self.train.iter().map(&mut f).collect(),
            test: self.test.iter().map(&mut f).collect(),
        }
    }
}

/// Zero mean, unit population standard deviation. Constant input maps to zeros.
pub fn z_normalize_values(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < DEGENERATE_STD {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / std).collect()
}

pub fn z_normalize(s: &TimeSeries) -> TimeSeries {
    s.with_values(z_normalize_values(s.values()))
}

/// Linear interpolation of `values` at fractional index `pos` in `[0, len-1]`.
///
/// Integer positions return the stored value bit-for-bit, and the result is
/// clamped to the two neighbouring samples.
pub fn interpolate_at(values: &[f64], pos: f64) -> f64 {
    let last = values.len() - 1;
    if pos <= 0.0 {
        return values[0];
    }
    if pos >= last as f64 {
        return values[last];
    }
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 {
        return values[lo];
    }
    let (a, b) = (values[lo], values[lo + 1]);
    let v = a + frac * (b - a);
    v.clamp(a.min(b), a.max(b))
}

/// Endpoint-inclusive linear resampling to `target_len` points.
pub fn resample_linear_values(values: &[f64], target_len: usize) -> Vec<f64> {
    assert!(target_len >= 1, "target length must be positive");
    let len = values.len();
    if len == target_len {
        return values.to_vec();
    }
    if target_len == 1 {
        return vec![values[0]];
    }
    let span = (len - 1) as f64;
    let denom = (target_len - 1) as f64;
    (0..target_len)
        .map(|i| {
            if i == target_len - 1 {
                values[len - 1]
            } else {
                interpolate_at(values, i as f64 * span / denom)
            }
        })
        .collect()
}

pub fn resample_linear(s: &TimeSeries, target_len: usize) -> TimeSeries {
    s.with_values(resample_linear_values(s.values(), target_len))
}

/// Values at positions `0, step, 2*step, ...` while the position stays within
/// the series.
pub fn sample_at_interval_values(values: &[f64], step: f64) -> Vec<f64> {
    assert!(step > 0.0 && step.is_finite(), "step must be positive and finite");
    let last = (values.len() - 1) as f64;
    // k*step is computed directly so long walks do not accumulate drift.
    (0..)
        .map(|k| k as f64 * step)
        .take_while(|&pos| pos <= last + 1e-9)
        .map(|pos| interpolate_at(values, pos.min(last)))
        .collect()
}

pub fn sample_at_interval(s: &TimeSeries, step: f64) -> TimeSeries {
    s.with_values(sample_at_interval_values(s.values(), step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec(), "a").unwrap()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(TimeSeries::new(vec![], "a").is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN], "a").is_err());
        assert!(TimeSeries::new(vec![f64::INFINITY], "a").is_err());
    }

    #[test]
    fn z_normalize_examples() {
        assert_eq!(z_normalize(&ts(&[0.0, 0.0, 0.0])).values(), &[0.0, 0.0, 0.0]);
        let z = z_normalize(&ts(&[1.0, 2.0, 3.0]));
        // mean 2, population std sqrt(2/3)
        let expected = 1.0 / (2.0f64 / 3.0).sqrt();
        assert_abs_diff_eq!(z.values()[0], -expected, epsilon = 1e-12);
        assert_abs_diff_eq!(z.values()[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.values()[2], expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 1.22474, epsilon = 1e-5);
        assert_eq!(z.label().as_str(), "a");
    }

    #[test]
    fn z_normalize_length_one() {
        assert_eq!(z_normalize(&ts(&[42.0])).values(), &[0.0]);
    }

    #[test]
    fn resample_examples() {
        assert_eq!(resample_linear(&ts(&[0.0, 2.0]), 3).values(), &[0.0, 1.0, 2.0]);
        assert_eq!(resample_linear(&ts(&[5.0]), 4).values(), &[5.0; 4]);
        assert_eq!(
            resample_linear(&ts(&[0.0, 1.0, 2.0, 3.0]), 4).values(),
            &[0.0, 1.0, 2.0, 3.0]
        );
        assert_eq!(resample_linear(&ts(&[3.0, 9.0, 1.0]), 1).values(), &[3.0]);
    }

    #[test]
    fn sample_at_interval_examples() {
        let s = ts(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(sample_at_interval(&s, 2.0).values(), &[0.0, 2.0]);
        assert_eq!(sample_at_interval(&s, 1.5).values(), &[0.0, 1.5, 3.0]);
        assert_eq!(sample_at_interval(&ts(&[7.0]), 1.0).values(), &[7.0]);
        assert_eq!(sample_at_interval(&s, 10.0).values(), &[0.0]);
    }

    #[test]
    fn dataset_flags_unseen_labels() {
        let d = Dataset::new(
            "d",
            vec![TimeSeries::new(vec![1.0], "x").unwrap()],
            vec![
                TimeSeries::new(vec![1.0], "x").unwrap(),
                TimeSeries::new(vec![1.0], "y").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(d.unseen_test_labels(), vec![Label::from("y")]);
        assert!(Dataset::new("e", vec![], d.test.clone()).is_err());
    }

    fn finite_vec(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3f64..1e3, 1..max_len)
    }

    proptest! {
        #[test]
        fn resample_identity_is_bitwise(v in finite_vec(40)) {
            let out = resample_linear_values(&v, v.len());
            prop_assert_eq!(out, v);
        }

        #[test]
        fn sample_unit_step_is_identity(v in finite_vec(40)) {
            prop_assert_eq!(sample_at_interval_values(&v, 1.0), v);
        }

        #[test]
        fn resample_stays_within_range(v in finite_vec(30), target in 1usize..80) {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let out = resample_linear_values(&v, target);
            prop_assert_eq!(out.len(), target);
            prop_assert!(out.iter().all(|&x| x >= lo && x <= hi));
            if target >= 2 {
                prop_assert_eq!(out[0], v[0]);
                prop_assert_eq!(out[target - 1], v[v.len() - 1]);
            }
        }

        #[test]
        fn z_normalize_moments_and_idempotence(v in finite_vec(40)) {
            let z = z_normalize_values(&v);
            let n = z.len() as f64;
            let mean = z.iter().sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            let var = z.iter().map(|x| x * x).sum::<f64>() / n;
            prop_assert!(var.abs() < 1e-9 || (var.sqrt() - 1.0).abs() < 1e-9);
            let zz = z_normalize_values(&z);
            for (a, b) in z.iter().zip(&zz) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
