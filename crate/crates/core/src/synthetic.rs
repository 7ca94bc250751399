//! Small labelled shape datasets for demos and tests.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;
use crate::series::{Dataset, TimeSeries};

/// Number of distinct shape classes available.
pub const SHAPE_COUNT: usize = 6;

/// Noise-free prototype of class `class` at relative position `x` in `[0, 1]`.
pub fn shape(class: usize, x: f64) -> f64 {
    match class % SHAPE_COUNT {
        0 => (2.0 * PI * x).sin(),
        1 => 1.0 - 4.0 * (x - 0.5).abs(),
        2 => (-((x - 0.5) / 0.12).powi(2)).exp(),
        3 => (4.0 * PI * x).cos(),
        4 => 2.0 * x - 1.0,
        _ => (-((x - 0.25) / 0.08).powi(2)).exp() - (-((x - 0.75) / 0.08).powi(2)).exp(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub classes: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub length: usize,
    /// Standard deviation of additive Gaussian noise.
    pub noise: f64,
    /// Largest random shift of the shape, as a fraction of the length.
    pub max_shift: f64,
}

impl Default for ShapeSpec {
    fn default() -> Self {
        Self {
            classes: 3,
            train_per_class: 5,
            test_per_class: 5,
            length: 48,
            noise: 0.05,
            max_shift: 0.03,
        }
    }
}

fn instance<R: Rng + ?Sized>(class: usize, spec: &ShapeSpec, rng: &mut R) -> Result<TimeSeries> {
    let normal = Normal::new(0.0, spec.noise).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let shift = if spec.max_shift > 0.0 {
        rng.random_range(-spec.max_shift..=spec.max_shift)
    } else {
        0.0
    };
    let denom = (spec.length.max(2) - 1) as f64;
    let values = (0..spec.length)
        .map(|t| shape(class, (t as f64 / denom + shift).clamp(0.0, 1.0)) + normal.sample(rng))
        .collect();
    TimeSeries::new(values, format!("{}", class + 1))
}

/// Equal-length dataset with `classes` shape classes. Train and test
/// instances are interleaved by class.
pub fn shapes_dataset(name: &str, spec: &ShapeSpec, seed: u64) -> Result<Dataset> {
    if spec.classes == 0 || spec.classes > SHAPE_COUNT || spec.length < 3 {
        return Err(Error::InvalidInput(format!(
            "need 1..={SHAPE_COUNT} classes and length >= 3, got {} and {}",
            spec.classes, spec.length
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut split = |per_class: usize| -> Result<Vec<TimeSeries>> {
        let mut out = Vec::with_capacity(per_class * spec.classes);
        for _ in 0..per_class {
            for c in 0..spec.classes {
                out.push(instance(c, spec, &mut rng)?);
            }
        }
        Ok(out)
    };
    let train = split(spec.train_per_class)?;
    let test = split(spec.test_per_class)?;
    Dataset::new(name, train, test)
}
