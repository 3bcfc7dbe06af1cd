//! Experiment configuration, initial-condition fitting, metrics and runs.

pub mod config;
pub mod fit;
pub mod metrics;
pub mod presets;
pub mod run;

pub use config::{
    CollocationSpec, DynamicsSpec, ExperimentConfig, FitConfig, InitialSpec, ModelSpec, OutputSpec, ProblemSpec,
    ReferenceSpec, Seeds, SolverSpec, TimeSpec, SEED_ENV,
};
pub use fit::{fit_initial_condition, FitOutcome};
pub use metrics::{metrics_csv, parse_metrics_csv, relative_l2, write_atomic, MetricsRow};
pub use run::{compare, compare_configs, compare_to_file, fit_only, run, run_fit, simulate, RunOutput, Simulation};
