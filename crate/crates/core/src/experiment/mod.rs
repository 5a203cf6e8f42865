//! JSON-configured experiments: validated configs, a deterministic
//! replica runner, and CSV / JSON-lines emitters.

mod config;
mod emit;
mod runner;

pub use config::{ExperimentConfig, ExperimentKind, ModelSpec};
pub use emit::{emit_csv, emit_json, write_outputs};
pub use runner::{
    run_experiment, run_experiment_with_jobs, ObservableSeries, ProbeValue, ResultRecord,
};
