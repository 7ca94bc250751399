//! Ensemble classifiers: BOSS and Proximity Forest.

pub mod boss;
pub mod pf;
pub mod sfa;

pub use boss::{BossMember, BossModel, SfaConfig};
pub use pf::{PfConfig, PfModel, ProximityTree};
pub use sfa::{boss_distance, fit_mcb_bins, sfa_transform, BossHistogram, McbBins};

pub(crate) mod vote {
    use std::collections::BTreeMap;

    use crate::series::Label;

    fn tally<'a>(votes: &[&'a Label]) -> BTreeMap<&'a Label, usize> {
        let mut counts = BTreeMap::new();
        for v in votes {
            *counts.entry(*v).or_insert(0) += 1;
        }
        counts
    }

    /// Most frequent label; ties go to the label voted for earliest.
    pub fn majority_first_wins<'a>(votes: &[&'a Label]) -> Option<&'a Label> {
        let counts = tally(votes);
        let top = counts.values().copied().max()?;
        votes.iter().copied().find(|l| counts[l] == top)
    }

    /// Most frequent label; ties go to the smallest label.
    pub fn majority_by_label_order<'a>(votes: &[&'a Label]) -> Option<&'a Label> {
        let counts = tally(votes);
        let top = counts.values().copied().max()?;
        counts.into_iter().find(|&(_, c)| c == top).map(|(l, _)| l)
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn tie_rules() {
            let (a, b, c) = (Label::from("a"), Label::from("b"), Label::from("c"));
            assert_eq!(majority_first_wins(&[&b, &a, &b]), Some(&b));
            assert_eq!(majority_first_wins(&[&c, &a, &a, &c]), Some(&c));
            assert_eq!(majority_by_label_order(&[&c, &a, &a, &c]), Some(&a));
            assert_eq!(majority_first_wins(&[]), None);
        }
    }
}
