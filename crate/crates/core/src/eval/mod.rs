//! Ranking methodology: per-dataset ranks, average ranks, the Nemenyi
//! critical difference and critical-difference diagrams.

pub mod cd;
pub mod diagram;
pub mod ranks;

pub use cd::{critical_difference, group_cliques, nemenyi_q, CdResult};
pub use diagram::{diagram_entries, render_svg, render_text};
pub use ranks::{average_ranks, rank_within_dataset, AccuracyTable, RankTable};
