//! Experiment configuration, orchestration and output.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{parse_config, parse_solver_list, ExperimentSpec, Overrides, ResolvedConfig, SweepVariable};
pub use experiment::{run_experiment, BeamRow, ExperimentOutput, ResultRow, RunOptions, SolutionRecord};
pub use output::{comparison_table, emit_csv, render_manifest, write_run, ComparisonRow, RESULTS_HEADER};
