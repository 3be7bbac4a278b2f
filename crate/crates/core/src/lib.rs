//! Link-level simulator for power-domain user grouping on a GEO satellite
//! downlink.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: pathloss, shadowing, gains and noise for GEO-to-ground links.
//! - [`scenario`]: beam layout, RBG plan, UE drops and per-RBG problem instances.
//! - [`solvers`]: alternate FP, conventional FP, WMMSE and a brute-force oracle.
//! - [`metrics`]: spectral efficiency, average RBG rate and total sum rate.
//! - [`sim`]: configuration, Monte Carlo orchestration and CSV output.

pub mod channel;
pub mod error;
pub mod metrics;
pub mod scenario;
pub mod sim;
pub mod solvers;

pub use channel::{BandLabel, FrequencyBand, NoiseModel, PathlossBreakdown, ShadowFadingModel};
pub use error::{Error, Result};
pub use metrics::RateVector;
pub use scenario::{Deployment, Preset, RbgInstance, RbgPlan, ScenarioConfig};
pub use solvers::{
    Association, GainConvention, PowerAllocation, ProblemInstance, SolverKind, SolverOptions, SolverReport,
};
pub use sim::{parse_config, run_experiment, write_run, ExperimentSpec, Overrides, ResolvedConfig, ResultRow, RunOptions};
