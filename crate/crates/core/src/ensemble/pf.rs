//! Proximity Forest: randomized trees that split on proximity to one
//! exemplar per class under a randomly drawn distance measure.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::vote;
use crate::distance::DistanceMeasure;
use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, sub_seed, SeededRng};
use crate::series::{Label, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfConfig {
    pub num_trees: usize,
    pub candidates_per_node: usize,
    pub measure_pool: Vec<DistanceMeasure>,
    pub seed: u64,
}

impl Default for PfConfig {
    fn default() -> Self {
        Self {
            num_trees: 100,
            candidates_per_node: 5,
            measure_pool: DistanceMeasure::ALL.to_vec(),
            seed: 0,
        }
    }
}

impl PfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_trees == 0 || self.candidates_per_node == 0 || self.measure_pool.is_empty() {
            return Err(Error::InvalidInput(
                "num_trees, candidates_per_node and the measure pool must be non-empty".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
pub enum Node {
    Leaf {
        label: Label,
    },
    Split {
        measure: DistanceMeasure,
        /// Training-set indices of the exemplars, one per branch.
        exemplars: Vec<usize>,
        children: Vec<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityTree {
    pub root: Node,
}

impl ProximityTree {
    /// Label of the leaf `query` reaches.
    pub fn route<'a>(&'a self, query: &[f64], train: &[TimeSeries]) -> &'a Label {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { label } => return label,
                Node::Split {
                    measure,
                    exemplars,
                    children,
                } => node = &children[nearest_exemplar(*measure, query, exemplars, train)],
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn depth(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 0,
                Node::Split { children, .. } => 1 + children.iter().map(depth).max().unwrap_or(0),
            }
        }
        depth(&self.root)
    }

    pub fn leaves(&self) -> usize {
        fn leaves(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Split { children, .. } => children.iter().map(leaves).sum(),
            }
        }
        leaves(&self.root)
    }
}

/// Branch whose exemplar is closest to `query`; the lowest branch wins ties.
fn nearest_exemplar(measure: DistanceMeasure, query: &[f64], exemplars: &[usize], train: &[TimeSeries]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (b, &e) in exemplars.iter().enumerate() {
        let d = measure.distance(query, train[e].values());
        if d < best.1 {
            best = (b, d);
        }
    }
    best.0
}

fn gini(labels: &[&Label]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let mut counts: BTreeMap<&Label, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(*l).or_insert(0) += 1;
    }
    let n = labels.len() as f64;
    1.0 - counts.values().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

struct Candidate {
    measure: DistanceMeasure,
    exemplars: Vec<usize>,
    branches: Vec<Vec<usize>>,
    gain: f64,
}

struct TreeBuilder<'a> {
    train: &'a [TimeSeries],
    cfg: &'a PfConfig,
    rng: SeededRng,
}

impl TreeBuilder<'_> {
    fn candidate(&mut self, idx: &[usize], by_class: &BTreeMap<&Label, Vec<usize>>) -> Candidate {
        let measure = self.cfg.measure_pool[self.rng.random_range(0..self.cfg.measure_pool.len())];
        let exemplars: Vec<usize> = by_class
            .values()
            .map(|members| members[self.rng.random_range(0..members.len())])
            .collect();
        let mut branches = vec![Vec::new(); exemplars.len()];
        for &i in idx {
            branches[nearest_exemplar(measure, self.train[i].values(), &exemplars, self.train)].push(i);
        }
        let labels = |ids: &[usize]| ids.iter().map(|&i| self.train[i].label()).collect::<Vec<_>>();
        let parent = gini(&labels(idx));
        let n = idx.len() as f64;
        let weighted: f64 = branches
            .iter()
            .map(|b| b.len() as f64 / n * gini(&labels(b)))
            .sum();
        Candidate {
            measure,
            exemplars,
            branches,
            gain: parent - weighted,
        }
    }

    fn build(&mut self, idx: &[usize]) -> Node {
        let mut by_class: BTreeMap<&Label, Vec<usize>> = BTreeMap::new();
        for &i in idx {
            by_class.entry(self.train[i].label()).or_default().push(i);
        }
        if by_class.len() == 1 {
            let label = by_class.into_keys().next().expect("non-empty node").clone();
            return Node::Leaf { label };
        }
        let majority = by_class
            .iter()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(a.0)))
            .map(|(l, _)| (*l).clone())
            .expect("non-empty node");

        let mut best: Option<Candidate> = None;
        for _ in 0..self.cfg.candidates_per_node {
            let c = self.candidate(idx, &by_class);
            if best.as_ref().is_none_or(|b| c.gain > b.gain) {
                best = Some(c);
            }
        }
        let best = best.expect("at least one candidate");
        if best.branches.iter().any(|b| b.len() == idx.len()) {
            return Node::Leaf { label: majority };
        }
        let children = best
            .branches
            .iter()
            .zip(&best.exemplars)
            .map(|(branch, &e)| {
                if branch.is_empty() {
                    Node::Leaf {
                        label: self.train[e].label().clone(),
                    }
                } else {
                    self.build(branch)
                }
            })
            .collect();
        Node::Split {
            measure: best.measure,
            exemplars: best.exemplars,
            children,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfModel {
    pub config: PfConfig,
    pub train: Vec<TimeSeries>,
    pub trees: Vec<ProximityTree>,
}

impl PfModel {
    pub fn fit(train: &[TimeSeries], cfg: &PfConfig) -> Result<Self> {
        cfg.validate()?;
        if train.is_empty() {
            return Err(Error::InvalidInput("Proximity Forest needs training data".into()));
        }
        let all: Vec<usize> = (0..train.len()).collect();
        let trees = (0..cfg.num_trees)
            .into_par_iter()
            .map(|t| {
                let mut builder = TreeBuilder {
                    train,
                    cfg,
                    rng: rng_from_seed(sub_seed(cfg.seed, t as u64)),
                };
                ProximityTree {
                    root: builder.build(&all),
                }
            })
            .collect();
        Ok(Self {
            config: cfg.clone(),
            train: train.to_vec(),
            trees,
        })
    }

    /// Majority vote over trees; ties go to the smallest label.
    pub fn predict(&self, query: &TimeSeries) -> Label {
        let votes: Vec<&Label> = self
            .trees
            .iter()
            .map(|t| t.route(query.values(), &self.train))
            .collect();
        vote::majority_by_label_order(&votes)
            .expect("forest has at least one tree")
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: Vec<f64>, l: &str) -> TimeSeries {
        TimeSeries::new(v, l).unwrap()
    }

    fn levels() -> Vec<TimeSeries> {
        (0..6)
            .flat_map(|i| {
                let e = 0.01 * i as f64;
                [
                    ts(vec![-1.0 + e, -1.0, -1.0 - e, -1.0], "low"),
                    ts(vec![1.0 - e, 1.0, 1.0 + e, 1.0], "high"),
                ]
            })
            .collect()
    }

    fn small_cfg(seed: u64) -> PfConfig {
        PfConfig {
            num_trees: 10,
            seed,
            ..PfConfig::default()
        }
    }

    #[test]
    fn single_class_gives_single_leaves() {
        let train: Vec<TimeSeries> = (0..5).map(|i| ts(vec![i as f64, 1.0], "only")).collect();
        let m = PfModel::fit(&train, &small_cfg(1)).unwrap();
        assert!(m.trees.iter().all(|t| t.root == Node::Leaf { label: "only".into() }));
        assert_eq!(m.predict(&ts(vec![9.0, 9.0], "?")).as_str(), "only");
    }

    #[test]
    fn separated_levels_self_classify() {
        let train = levels();
        let m = PfModel::fit(&train, &small_cfg(2)).unwrap();
        for s in &train {
            assert_eq!(&m.predict(s), s.label());
        }
        for t in &m.trees {
            assert!(t.depth() <= train.len());
        }
    }

    #[test]
    fn seeded_forests_repeat() {
        let train = levels();
        let a = PfModel::fit(&train, &small_cfg(3)).unwrap();
        let b = PfModel::fit(&train, &small_cfg(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_tree_votes_its_leaf() {
        let train = levels();
        let cfg = PfConfig {
            num_trees: 1,
            ..small_cfg(4)
        };
        let m = PfModel::fit(&train, &cfg).unwrap();
        let q = ts(vec![0.9, 1.1, 0.8, 1.0], "?");
        assert_eq!(&m.predict(&q), m.trees[0].route(q.values(), &m.train));
    }

    #[test]
    fn indistinguishable_instances_make_a_majority_leaf() {
        let train = vec![
            ts(vec![1.0, 2.0], "b"),
            ts(vec![1.0, 2.0], "a"),
            ts(vec![1.0, 2.0], "a"),
        ];
        let m = PfModel::fit(&train, &small_cfg(5)).unwrap();
        assert_eq!(m.predict(&train[0]).as_str(), "a");
    }

    #[test]
    fn json_round_trip() {
        let m = PfModel::fit(&levels(), &small_cfg(6)).unwrap();
        let back: PfModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn gini_values() {
        let (a, b) = (Label::from("a"), Label::from("b"));
        assert_eq!(gini(&[&a, &a]), 0.0);
        assert_eq!(gini(&[&a, &b]), 0.5);
    }
}
