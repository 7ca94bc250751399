//! Classification of variable-length time series: generators that turn
//! equal-length datasets into variable-length ones, length-equalizing
//! preprocessors, elastic distances, 1-NN and ensemble classifiers, and
//! rank-based evaluation with critical-difference diagrams.

pub mod distance;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod generators;
pub mod nn;
pub mod preprocess;
pub mod report;
pub mod seed;
pub mod series;
pub mod synthetic;
pub mod ucr;

pub use error::{Error, Result};
pub use series::{Dataset, Label, TimeSeries};
