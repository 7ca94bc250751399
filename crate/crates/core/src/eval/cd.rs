use serde::{Deserialize, Serialize};

use super::ranks::RankTable;
use crate::error::{Error, Result};

/// Two-tailed Nemenyi critical values q_alpha for k = 2..=30 compared
/// methods: the infinite-df studentized range quantile divided by sqrt(2).
const Q_05: [f64; 29] = [
    1.9600, 2.3437, 2.5690, 2.7278, 2.8497, 2.9483, 3.0309, 3.1017, 3.1637, 3.2187, 3.2680, 3.3127, 3.3536, 3.3912,
    3.4260, 3.4584, 3.4887, 3.5171, 3.5438, 3.5690, 3.5929, 3.6156, 3.6373, 3.6579, 3.6776, 3.6964, 3.7145, 3.7319,
    3.7486,
];
const Q_10: [f64; 29] = [
    1.6449, 2.0523, 2.2913, 2.4595, 2.5885, 2.6927, 2.7799, 2.8546, 2.9199, 2.9778, 3.0297, 3.0767, 3.1197, 3.1592,
    3.1957, 3.2297, 3.2615, 3.2912, 3.3192, 3.3457, 3.3707, 3.3945, 3.4171, 3.4387, 3.4593, 3.4790, 3.4979, 3.5160,
    3.5335,
];

pub fn nemenyi_q(k: usize, alpha: f64) -> Result<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_10
    } else {
        return Err(Error::CriticalValueUnavailable { k, alpha });
    };
    if !(2..=30).contains(&k) {
        return Err(Error::CriticalValueUnavailable { k, alpha });
    }
    Ok(table[k - 2])
}

/// `q_alpha * sqrt(k (k + 1) / (6 n))`.
pub fn critical_difference(k: usize, n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("critical difference needs at least one dataset".into()));
    }
    let q = nemenyi_q(k, alpha)?;
    Ok(q * ((k * (k + 1)) as f64 / (6 * n) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdResult {
    pub cd: f64,
    pub q_alpha: f64,
    pub alpha: f64,
    /// Column indices of each maximal clique, best ranks first.
    pub groups: Vec<Vec<usize>>,
}

impl CdResult {
    pub fn compute(ranks: &RankTable, alpha: f64) -> Result<Self> {
        let q_alpha = nemenyi_q(ranks.k(), alpha)?;
        let cd = critical_difference(ranks.k(), ranks.n(), alpha)?;
        Ok(Self {
            cd,
            q_alpha,
            alpha,
            groups: group_cliques(&ranks.average_rank, cd),
        })
    }
}

/// Maximal runs of rank-sorted columns whose spread is below `cd`.
///
/// Every column belongs to at least one group; a group contained in another
/// is dropped.
pub fn group_cliques(average_rank: &[f64], cd: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..average_rank.len()).collect();
    order.sort_by(|&a, &b| average_rank[a].total_cmp(&average_rank[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last_end = None;
    for start in 0..order.len() {
        let mut end = start;
        while end + 1 < order.len() && average_rank[order[end + 1]] - average_rank[order[start]] < cd {
            end += 1;
        }
        // a run ending where the previous one ended is contained in it
        if last_end.is_some_and(|e| end <= e) {
            continue;
        }
        last_end = Some(end);
        groups.push(order[start..=end].to_vec());
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_anchors() {
        assert_eq!(nemenyi_q(28, 0.05).unwrap(), 3.7145);
        assert!((nemenyi_q(5, 0.05).unwrap() - 2.728).abs() < 5e-4);
        // the three-decimal tabulation rounds this one up; the exact quantile is 2.94832
        assert!((nemenyi_q(7, 0.05).unwrap() - 2.949).abs() <= 1e-3);
        assert!(nemenyi_q(31, 0.05).is_err());
        assert!(nemenyi_q(1, 0.05).is_err());
        assert!(nemenyi_q(5, 0.01).is_err());
    }

    #[test]
    fn cd_anchors() {
        for (k, n, expected, tol) in [
            (28, 85, 4.6864, 0.001),
            (5, 85, 0.6616, 0.001),
            (7, 85, 0.9769, 0.001),
            (28, 11, 13.0271, 0.005),
        ] {
            let cd = critical_difference(k, n, 0.05).unwrap();
            assert!((cd - expected).abs() <= tol, "k={k} n={n}: {cd}");
        }
    }

    #[test]
    fn cd_monotonicity() {
        for k in 2..30 {
            for n in 1..50 {
                let cd = critical_difference(k, n, 0.05).unwrap();
                assert!(critical_difference(k, n + 1, 0.05).unwrap() < cd);
                assert!(critical_difference(k + 1, n, 0.05).unwrap() > cd);
            }
        }
    }

    #[test]
    fn clique_examples() {
        assert_eq!(group_cliques(&[1.0, 1.2, 3.0], 0.5), vec![vec![0, 1], vec![2]]);
        assert_eq!(group_cliques(&[3.0, 1.0, 2.0], 10.0), vec![vec![1, 2, 0]]);
        assert_eq!(group_cliques(&[1.0, 2.0, 3.0], 0.0), vec![vec![0], vec![1], vec![2]]);
        // overlapping cliques
        assert_eq!(
            group_cliques(&[1.0, 1.6, 2.2, 4.0], 1.0),
            vec![vec![0, 1], vec![1, 2], vec![3]]
        );
    }

    #[test]
    fn cliques_cover_and_are_maximal() {
        let ranks = [2.1, 4.5, 1.0, 3.3, 3.0, 5.9, 1.4];
        for cd in [0.0, 0.3, 0.9, 1.5, 2.5, 10.0] {
            let g = group_cliques(&ranks, cd);
            for c in 0..ranks.len() {
                assert!(g.iter().any(|grp| grp.contains(&c)));
            }
            for (i, a) in g.iter().enumerate() {
                for (j, b) in g.iter().enumerate() {
                    if i != j {
                        assert!(!a.iter().all(|x| b.contains(x)), "{a:?} within {b:?}");
                    }
                }
            }
        }
    }
}
