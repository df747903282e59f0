//! Comparative experiment harness: ablation baselines, the graph-count sweep
//! and multi-seed aggregation.

mod methods;
mod probe;
mod sweep;

pub use methods::{run_experiment, run_seed, ExperimentSpec, Method, RunOutput, RunResult};
pub use probe::probe_alignment;
pub use sweep::{graph_count_sweep, SubsetResult, SweepEntry, SweepResult};
