//! One-nearest-neighbour classification under any [`DistanceMeasure`].

use crate::distance::DistanceMeasure;
use crate::error::{Error, Result};
use crate::series::{Label, TimeSeries};

#[derive(Debug, Clone)]
pub struct NnModel {
    training_set: Vec<TimeSeries>,
    measure: DistanceMeasure,
}

impl NnModel {
    pub fn new(training_set: Vec<TimeSeries>, measure: DistanceMeasure) -> Result<Self> {
        if training_set.is_empty() {
            return Err(Error::InvalidInput("1-NN needs at least one training series".into()));
        }
        Ok(Self { training_set, measure })
    }

    pub fn measure(&self) -> DistanceMeasure {
        self.measure
    }

    /// Index and distance of the nearest training series; the lowest index
    /// wins ties.
    pub fn nearest(&self, query: &TimeSeries) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, t) in self.training_set.iter().enumerate() {
            // abandoning only discards candidates strictly worse than best
            let d = self.measure.distance_bounded(query.values(), t.values(), best.1);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    pub fn classify(&self, query: &TimeSeries) -> &Label {
        self.training_set[self.nearest(query).0].label()
    }

    pub fn evaluate_accuracy(&self, test: &[TimeSeries]) -> f64 {
        accuracy(test.iter().map(|q| (self.classify(q), q.label())))
    }
}

/// Fraction of `(predicted, actual)` pairs that agree.
pub fn accuracy<'a, I>(pairs: I) -> f64
where
    I: IntoIterator<Item = (&'a Label, &'a Label)>,
{
    let (hits, total) = pairs
        .into_iter()
        .fold((0usize, 0usize), |(h, t), (p, a)| (h + usize::from(p == a), t + 1));
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}
