//! Pairwise distances between series of possibly different lengths.
//!
//! All functions take raw slices and never fail: every measure is defined
//! for any pair of non-empty inputs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{resample_linear_values, z_normalize_values};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMeasure {
    /// Euclidean distance over the common prefix (longer series truncated).
    EuclideanTruncate,
    /// Unconstrained DTW with squared point cost.
    DtwFull,
    /// Best z-normalized sliding-window match of the shorter series.
    SubsequenceSliding,
    /// Best Euclidean match over stretchings of the shorter series.
    UniformScalingDist,
    /// One minus the maximum normalized cross-correlation.
    ShapeBased,
}

impl DistanceMeasure {
    pub const ALL: [DistanceMeasure; 5] = [
        DistanceMeasure::EuclideanTruncate,
        DistanceMeasure::DtwFull,
        DistanceMeasure::SubsequenceSliding,
        DistanceMeasure::UniformScalingDist,
        DistanceMeasure::ShapeBased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceMeasure::EuclideanTruncate => "ed",
            DistanceMeasure::DtwFull => "dtw",
            DistanceMeasure::SubsequenceSliding => "ssd",
            DistanceMeasure::UniformScalingDist => "us",
            DistanceMeasure::ShapeBased => "sbd",
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            DistanceMeasure::EuclideanTruncate => dist_ed_truncate(a, b),
            DistanceMeasure::DtwFull => dist_dtw_full(a, b),
            DistanceMeasure::SubsequenceSliding => dist_ssd(a, b),
            DistanceMeasure::UniformScalingDist => dist_us(a, b),
            DistanceMeasure::ShapeBased => dist_sbd(a, b),
        }
    }

    /// Like [`distance`](Self::distance), but may return `f64::INFINITY` once
    /// the result is known to exceed `cutoff`. Values `<= cutoff` are exact.
    pub fn distance_bounded(self, a: &[f64], b: &[f64], cutoff: f64) -> f64 {
        match self {
            DistanceMeasure::EuclideanTruncate => ed_bounded(a, b, cutoff),
            DistanceMeasure::DtwFull => dtw_bounded(a, b, cutoff),
            _ => self.distance(a, b),
        }
    }
}

impl fmt::Display for DistanceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistanceMeasure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "distance measure",
                name: s.to_owned(),
            })
    }
}

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist_ed_truncate(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

fn ed_bounded(a: &[f64], b: &[f64], cutoff: f64) -> f64 {
    // slack keeps rounding in the squared bound from discarding a tie
    let limit = cutoff * cutoff * (1.0 + 1e-12);
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += (x - y) * (x - y);
        if acc > limit {
            return f64::INFINITY;
        }
    }
    acc.sqrt()
}

/// Accumulated squared cost of the optimal unconstrained warping path.
pub fn dist_dtw_full(a: &[f64], b: &[f64]) -> f64 {
    dtw_bounded(a, b, f64::INFINITY)
}

/// Rolling two-row DTW over the shorter series; abandons when a whole row
/// exceeds `cutoff`.
fn dtw_bounded(a: &[f64], b: &[f64], cutoff: f64) -> f64 {
    let (rows, cols) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let m = cols.len();
    let mut prev = vec![f64::INFINITY; m];
    let mut curr = vec![f64::INFINITY; m];
    for (i, &x) in rows.iter().enumerate() {
        let mut row_min = f64::INFINITY;
        for j in 0..m {
            let cost = (x - cols[j]) * (x - cols[j]);
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let up = prev[j];
                let left = if j > 0 { curr[j - 1] } else { f64::INFINITY };
                let diag = if j > 0 { prev[j - 1] } else { f64::INFINITY };
                up.min(left).min(diag)
            };
            curr[j] = best + cost;
            row_min = row_min.min(curr[j]);
        }
        if row_min > cutoff {
            return f64::INFINITY;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[m - 1]
}

/// Full `len(a) x len(b)` accumulated-cost matrix. Quadratic memory; meant
/// for inspection and cross-checking the rolling implementation.
pub fn dtw_cost_matrix(a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let (n, m) = (a.len(), b.len());
    let mut acc = vec![vec![f64::INFINITY; m]; n];
    for i in 0..n {
        for j in 0..m {
            let cost = (a[i] - b[j]) * (a[i] - b[j]);
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => acc[0][j - 1],
                (_, 0) => acc[i - 1][0],
                _ => acc[i - 1][j].min(acc[i][j - 1]).min(acc[i - 1][j - 1]),
            };
            acc[i][j] = best + cost;
        }
    }
    acc
}

/// Orders a pair as (shorter, longer); the first argument wins ties.
fn by_length<'a>(a: &'a [f64], b: &'a [f64]) -> (&'a [f64], &'a [f64]) {
    if a.len() <= b.len() {
        (a, b)
    } else {
        (b, a)
    }
}

/// Minimum distance between the z-normalized shorter series and every
/// z-normalized window of the longer one.
pub fn dist_ssd(a: &[f64], b: &[f64]) -> f64 {
    let (short, long) = by_length(a, b);
    let query = z_normalize_values(short);
    let m = query.len();
    long.windows(m)
        .map(|w| squared_euclidean(&query, &z_normalize_values(w)))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Minimum Euclidean distance between the shorter series stretched to each
/// length `p` in `m..=n` and the length-`p` prefix of the longer series.
pub fn dist_us(a: &[f64], b: &[f64]) -> f64 {
    let (short, long) = by_length(a, b);
    (short.len()..=long.len())
        .map(|p| squared_euclidean(&resample_linear_values(short, p), &long[..p]))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Shape-based distance in `[0, 2]`; 1 when either series has zero norm.
pub fn dist_sbd(a: &[f64], b: &[f64]) -> f64 {
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let norm = (sq(a) * sq(b)).sqrt();
    if norm == 0.0 {
        return 1.0;
    }
    let (n, m) = (a.len() as isize, b.len() as isize);
    // shift s pairs a[i] with b[i - s]
    let best = (-(m - 1)..n)
        .map(|s| {
            let lo = s.max(0);
            let hi = n.min(m + s);
            (lo..hi).map(|i| a[i as usize] * b[(i - s) as usize]).sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    (1.0 - best / norm).clamp(0.0, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ed_examples() {
        assert_eq!(dist_ed_truncate(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(dist_ed_truncate(&[1.0, 2.0, 3.0, 9.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(dist_ed_truncate(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
    }

    #[test]
    fn dtw_examples() {
        let s = [0.3, -1.0, 2.5, 0.0];
        assert_eq!(dist_dtw_full(&s, &s), 0.0);
        assert_eq!(dist_dtw_full(&[2.0], &[2.0; 7]), 0.0);
        // paths on the 3x2 grid: the best aligns 2 with either 1 or 3
        assert_eq!(dist_dtw_full(&[1.0, 2.0, 3.0], &[1.0, 3.0]), 1.0);
        assert_eq!(dist_dtw_full(&[1.0, 3.0], &[1.0, 2.0, 3.0]), 1.0);
    }

    #[test]
    fn dtw_matrix_agrees_with_rolling() {
        let a = [0.5, 1.5, -2.0, 3.0, 0.0];
        let b = [1.0, -1.0, 2.0];
        let full = dtw_cost_matrix(&a, &b);
        assert_eq!(full[4][2], dist_dtw_full(&a, &b));
    }

    #[test]
    fn bounded_distances_are_exact_below_cutoff() {
        let a = [0.0, 1.0, 2.0, 1.0];
        let b = [0.0, 2.0, 2.0, 0.0];
        let d = dist_dtw_full(&a, &b);
        assert_eq!(DistanceMeasure::DtwFull.distance_bounded(&a, &b, d), d);
        assert_eq!(DistanceMeasure::DtwFull.distance_bounded(&a, &b, d / 4.0), f64::INFINITY);
        let e = dist_ed_truncate(&a, &b);
        assert_eq!(DistanceMeasure::EuclideanTruncate.distance_bounded(&a, &b, e), e);
        assert_eq!(DistanceMeasure::EuclideanTruncate.distance_bounded(&a, &b, 0.1), f64::INFINITY);
    }

    #[test]
    fn ssd_examples() {
        // affine copy of a window
        let long = [4.0, 1.0, 7.0, 2.0, 9.0];
        let short = [3.0 * 7.0 + 1.0, 3.0 * 2.0 + 1.0, 3.0 * 9.0 + 1.0];
        assert_abs_diff_eq!(dist_ssd(&short, &long), 0.0, epsilon = 1e-12);
        assert_eq!(dist_ssd(&long, &long), 0.0);
        assert_abs_diff_eq!(dist_ssd(&[1.0, 2.0], &[9.0, 9.0, 1.0, 2.0, 9.0]), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn us_examples() {
        assert_abs_diff_eq!(dist_us(&[1.0, 2.0], &[4.0, 6.0]), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_us(&[0.0, 2.0], &[0.0, 1.0, 2.0]), 0.0, epsilon = 1e-12);
        let ramp: Vec<f64> = (0..20).map(|i| 0.5 * i as f64 - 3.0).collect();
        let short = resample_linear_values(&ramp, 7);
        assert!(dist_us(&short, &ramp) < 1e-9);
    }

    #[test]
    fn sbd_examples() {
        let s = [0.2, -1.0, 3.0];
        assert_abs_diff_eq!(dist_sbd(&s, &s), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_sbd(&[1.0], &[-1.0]), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_sbd(&[0.0, 0.0, 1.0, 0.0], &[1.0, 0.0]), 0.0, epsilon = 1e-12);
        assert_eq!(dist_sbd(&[0.0, 0.0], &[1.0, 2.0]), 1.0);
    }

    #[test]
    fn sbd_ignores_leading_zeros() {
        let pattern = [1.0, -2.0, 0.5, 3.0];
        let mut shifted = vec![0.0; 5];
        shifted.extend_from_slice(&pattern);
        assert!(dist_sbd(&pattern, &shifted) <= 1e-9);
    }

    #[test]
    fn names_round_trip() {
        for m in DistanceMeasure::ALL {
            assert_eq!(m.name().parse::<DistanceMeasure>().unwrap(), m);
        }
    }

    fn series(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, 1..max)
    }

    proptest! {
        #[test]
        fn nonnegative_and_self_zero(a in series(16), b in series(16)) {
            for m in DistanceMeasure::ALL {
                let d = m.distance(&a, &b);
                prop_assert!(d >= 0.0, "{m}: {d}");
                if m != DistanceMeasure::ShapeBased || a.iter().any(|&x| x != 0.0) {
                    prop_assert!(m.distance(&a, &a) < 1e-9, "{m}");
                }
            }
            prop_assert!(dist_sbd(&a, &b) <= 2.0);
        }

        #[test]
        fn symmetric(a in series(16), b in series(16)) {
            for m in DistanceMeasure::ALL {
                let (ab, ba) = (m.distance(&a, &b), m.distance(&b, &a));
                prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()), "{m}: {ab} vs {ba}");
            }
        }

        #[test]
        fn dtw_bounded_by_squared_ed(pair in (1usize..20).prop_flat_map(|n| (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
        ))) {
            let (a, b) = pair;
            let ed = dist_ed_truncate(&a, &b);
            prop_assert!(dist_dtw_full(&a, &b) <= ed * ed + 1e-9);
        }
    }
}
