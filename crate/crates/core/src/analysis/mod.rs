//! Phase/block decomposition, the cycle fault model, analytic
//! relative-interval bounds, exhaustive min/max search, and
//! fault-difference curves.

pub mod curve;
pub mod cycle_model;
pub mod interval;
pub mod phases;
pub mod search;

pub use curve::{diff_ratio_curve, CurvePoint};
pub use cycle_model::CycleFaultModel;
pub use interval::{analytic_interval, table_rows, AnalyticInterval, IntervalBounds, TableRow};
pub use phases::{
    k_phases, min_cost_lower_bound, per_phase_faults, x_blocks, BlockPartition, PhasePartition,
};
pub use search::{exhaustive_minmax, MinMaxResult, SearchBudget};

use thiserror::Error;

use crate::engine::Algorithm;
use crate::graph::GraphClass;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no analytic bounds for ({a}, {b}) on {class} graphs")]
    UnsupportedPair {
        a: Algorithm,
        b: Algorithm,
        class: GraphClass,
    },
    #[error("cycle bounds need the vertex count N")]
    CycleNeedsN,
    #[error("cycle surplus r = N-k must satisfy 1 <= r <= k-1, got N={n}, k={k}")]
    SurplusOutOfRange { n: u32, k: usize },
    #[error("analytic bounds need k >= 2, got {0}")]
    KTooSmall(usize),
}
