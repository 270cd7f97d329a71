//! Paging-policy simulation and analysis on access graphs.
//!
//! An access graph restricts which page can be requested after which: every
//! request must equal the previous one or be one of its neighbors. This crate
//! simulates the classic paging policies LRU, FIFO, FWF, and FAR on request
//! sequences constrained by path, star, cycle, and complete access graphs,
//! and provides the analysis tooling around them:
//!
//! - [`graph`]: access-graph construction, the *respects* check, JSON/DOT export.
//! - [`engine`]: deterministic step-by-step simulation of all four policies,
//!   including FAR's graph-distance eviction rule.
//! - [`families`]: adversarial request-sequence families with closed-form
//!   predicted fault counts.
//! - [`analysis`]: k-phase and x-block decomposition, the cycle fault model
//!   (X_r), exact-rational relative-interval bounds, exhaustive min/max search
//!   over all graph-respecting sequences, and fault-difference curves.

pub mod analysis;
pub mod engine;
pub mod families;
pub mod graph;

pub use engine::{simulate, Algorithm, CacheConfig, EngineState, SimulationTrace, StepOutcome};
pub use graph::{AccessGraph, GraphClass, PageId, RequestSequence};
