//! Experiment configuration file.
//!
//! The file is TOML with one table per subsystem. Every key is optional when
//! a preset is selected; a `custom` scenario must name its band, beam count,
//! group size and power budget. Unknown keys are rejected.
//!
//! ```toml
//! [experiment]
//! preset = "S-SSB"            # S-SSB | S-MSB | Ka-SSB | Ka-MSB | custom
//! sweep = "drop_index"        # drop_index | ue_count
//! sweep_values = [2, 4, 8]    # ue_count sweep only (default 2..=10)
//! solvers = ["alternate-fp", "conventional-fp", "wmmse"]
//! seed = 20240601
//! oracle_grid_points = 51
//!
//! [scenario]
//! band = "S"                  # S | Ka
//! carrier_ghz = 2.0
//! bandwidth_hz = 30e6
//! beam_count = 1
//! beam_radius_m = 100000.0
//! ues_per_rbg = 4
//! scs_hz = 15000.0
//! rbs_per_rbg = 1
//! power_budget_per_beam_w = 10000.0
//! drops = 20
//! cost_budget = 0.0           # reserved, unused
//!
//! [channel]
//! altitude_m = 35786000.0
//! elevation_deg = 90.0
//! tx_antenna_gain_dbi = 30.0
//! rx_antenna_gain_dbi = 0.0
//! shadow_sigma_db = 4.0
//! thermal_density_dbm_hz = -174.0
//! noise_figure_db = 7.0
//!
//! [solver]
//! max_iterations = 1000
//! rel_tolerance = 1e-6
//! epsilon_guard = 1e-12
//! min_power_floor = 0.0
//! denominator_policy = "clamp"    # clamp | absolute | skip
//! convention = "victim-gain"      # victim-gain | interferer-gain
//! ```

use serde::{Deserialize, Serialize};

use crate::channel::{BandLabel, FrequencyBand};
use crate::error::{Error, Result};
use crate::scenario::{Preset, ScenarioConfig};
use crate::solvers::{DenominatorPolicy, GainConvention, SolverKind, SolverOptions, MAX_ORACLE_UES};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    experiment: ExperimentSection,
    #[serde(default)]
    scenario: ScenarioSection,
    #[serde(default)]
    channel: ChannelSection,
    #[serde(default)]
    solver: SolverSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    preset: Option<String>,
    sweep: Option<SweepVariable>,
    sweep_values: Option<Vec<usize>>,
    solvers: Option<Vec<String>>,
    seed: Option<u64>,
    oracle_grid_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    band: Option<BandLabel>,
    carrier_ghz: Option<f64>,
    bandwidth_hz: Option<f64>,
    beam_count: Option<usize>,
    beam_radius_m: Option<f64>,
    ues_per_rbg: Option<usize>,
    scs_hz: Option<f64>,
    rbs_per_rbg: Option<usize>,
    power_budget_per_beam_w: Option<f64>,
    drops: Option<usize>,
    cost_budget: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    altitude_m: Option<f64>,
    elevation_deg: Option<f64>,
    tx_antenna_gain_dbi: Option<f64>,
    rx_antenna_gain_dbi: Option<f64>,
    shadow_sigma_db: Option<f64>,
    thermal_density_dbm_hz: Option<f64>,
    noise_figure_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    max_iterations: Option<usize>,
    rel_tolerance: Option<f64>,
    epsilon_guard: Option<f64>,
    min_power_floor: Option<f64>,
    denominator_policy: Option<DenominatorPolicy>,
    convention: Option<GainConvention>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// One sweep point at the scenario's group size; drops form the x-axis.
    DropIndex,
    /// Group size varies over the sweep values.
    UeCount,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub sweep: SweepVariable,
    /// UE counts per RBG, one entry per sweep point.
    pub sweep_values: Vec<usize>,
    pub solvers: Vec<SolverKind>,
    pub seed: u64,
    pub oracle_grid_points: usize,
}

/// A fully validated run description with every default applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub experiment: ExperimentSpec,
    pub scenario: ScenarioConfig,
    pub solver: SolverOptions,
}

impl ResolvedConfig {
    /// Defaults of a named preset, with no config file.
    pub fn preset(preset: Preset) -> Result<Self> {
        parse_config("", &Overrides {
            preset: Some(preset),
            ..Overrides::default()
        })
    }

    /// TOML rendering of the resolved values.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("resolved config serializes")
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub solvers: Option<Vec<SolverKind>>,
}

pub const DEFAULT_UE_SWEEP: [usize; 9] = [2, 3, 4, 5, 6, 7, 8, 9, 10];
pub const DEFAULT_SOLVERS: [SolverKind; 3] = [SolverKind::AlternateFp, SolverKind::ConventionalFp, SolverKind::Wmmse];
pub const DEFAULT_ORACLE_GRID: usize = 51;

const CUSTOM_REQUIRED: [(&str, &str); 4] = [
    ("scenario", "band"),
    ("scenario", "beam_count"),
    ("scenario", "ues_per_rbg"),
    ("scenario", "power_budget_per_beam_w"),
];

/// 1-based line holding `key` inside `[section]`, if the file sets it.
fn key_line(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

struct Checker<'a> {
    text: &'a str,
}

impl Checker<'_> {
    fn fail(&self, section: &str, key: &str, msg: impl std::fmt::Display) -> Error {
        match key_line(self.text, section, key) {
            Some(line) => Error::config(format!("{section}.{key} (line {line}): {msg}")),
            None => Error::config(format!("{section}.{key}: {msg}")),
        }
    }

    fn positive(&self, section: &str, key: &str, v: f64) -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(section, key, format!("must be positive, got {v}")))
        }
    }

    fn finite(&self, section: &str, key: &str, v: f64) -> Result<()> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(section, key, format!("must be finite, got {v}")))
        }
    }

    fn at_least_one(&self, section: &str, key: &str, v: usize) -> Result<()> {
        if v >= 1 {
            Ok(())
        } else {
            Err(self.fail(section, key, "must be >= 1"))
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<ResolvedConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::config(e.to_string().trim_end().to_string()))?;
    let check = Checker { text };

    let preset = match (overrides.preset, &file.experiment.preset) {
        (Some(p), _) => p,
        (None, Some(name)) => name
            .parse::<Preset>()
            .map_err(|e| check.fail("experiment", "preset", e))?,
        (None, None) => Preset::Custom,
    };

    let sc = &file.scenario;
    let mut scenario = match ScenarioConfig::preset(preset) {
        Some(base) => base,
        None => {
            let present = [
                sc.band.is_some(),
                sc.beam_count.is_some(),
                sc.ues_per_rbg.is_some(),
                sc.power_budget_per_beam_w.is_some(),
            ];
            let missing: Vec<String> = CUSTOM_REQUIRED
                .iter()
                .zip(present)
                .filter(|(_, p)| !p)
                .map(|((s, k), _)| format!("{s}.{k}"))
                .collect();
            if !missing.is_empty() {
                return Err(Error::config(format!(
                    "custom scenario is missing required keys: {}",
                    missing.join(", ")
                )));
            }
            let label = sc.band.expect("checked above");
            ScenarioConfig::new(
                Preset::Custom.label(),
                FrequencyBand::preset(label),
                sc.beam_count.expect("checked above"),
            )
        }
    };

    if let Some(band) = sc.band {
        if band != scenario.band.label {
            scenario.band = FrequencyBand::preset(band);
        }
    }
    if let Some(v) = sc.carrier_ghz {
        check.positive("scenario", "carrier_ghz", v)?;
        scenario.band.carrier_ghz = v;
    }
    if let Some(v) = sc.bandwidth_hz {
        check.positive("scenario", "bandwidth_hz", v)?;
        scenario.band.total_bandwidth_hz = v;
    }
    if let Some(v) = sc.beam_count {
        check.at_least_one("scenario", "beam_count", v)?;
        scenario.beam_count = v;
    }
    if let Some(v) = sc.beam_radius_m {
        check.positive("scenario", "beam_radius_m", v)?;
        scenario.beam_radius_m = v;
    }
    if let Some(v) = sc.ues_per_rbg {
        check.at_least_one("scenario", "ues_per_rbg", v)?;
        scenario.ues_per_rbg = v;
    }
    if let Some(v) = sc.scs_hz {
        check.positive("scenario", "scs_hz", v)?;
        scenario.scs_hz = v;
    }
    if let Some(v) = sc.rbs_per_rbg {
        check.at_least_one("scenario", "rbs_per_rbg", v)?;
        scenario.rbs_per_rbg = v;
    }
    if let Some(v) = sc.power_budget_per_beam_w {
        check.positive("scenario", "power_budget_per_beam_w", v)?;
        scenario.power_budget_per_beam_w = v;
    }
    if let Some(v) = sc.drops {
        check.at_least_one("scenario", "drops", v)?;
        scenario.drops = v;
    }
    if let Some(v) = sc.cost_budget {
        check.finite("scenario", "cost_budget", v)?;
        scenario.cost_budget = Some(v);
    }

    let ch = &file.channel;
    if let Some(v) = ch.altitude_m {
        check.positive("channel", "altitude_m", v)?;
        scenario.altitude_m = v;
    }
    if let Some(v) = ch.elevation_deg {
        if !(v > 0.0 && v <= 90.0) {
            return Err(check.fail("channel", "elevation_deg", format!("must lie in (0, 90], got {v}")));
        }
        scenario.elevation_deg = v;
    }
    if let Some(v) = ch.tx_antenna_gain_dbi {
        check.finite("channel", "tx_antenna_gain_dbi", v)?;
        scenario.tx_antenna_gain_dbi = v;
    }
    if let Some(v) = ch.rx_antenna_gain_dbi {
        check.finite("channel", "rx_antenna_gain_dbi", v)?;
        scenario.rx_antenna_gain_dbi = v;
    }
    if let Some(v) = ch.shadow_sigma_db {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(check.fail("channel", "shadow_sigma_db", format!("must be >= 0, got {v}")));
        }
        scenario.shadow_sigma_db = v;
    }
    if let Some(v) = ch.thermal_density_dbm_hz {
        check.finite("channel", "thermal_density_dbm_hz", v)?;
        scenario.noise.thermal_density_dbm_hz = v;
    }
    if let Some(v) = ch.noise_figure_db {
        check.finite("channel", "noise_figure_db", v)?;
        scenario.noise.noise_figure_db = v;
    }

    let so = &file.solver;
    let mut solver = SolverOptions::default();
    if let Some(v) = so.max_iterations {
        check.at_least_one("solver", "max_iterations", v)?;
        solver.max_iterations = v;
    }
    if let Some(v) = so.rel_tolerance {
        check.positive("solver", "rel_tolerance", v)?;
        solver.rel_tolerance = v;
    }
    if let Some(v) = so.epsilon_guard {
        check.positive("solver", "epsilon_guard", v)?;
        solver.epsilon_guard = v;
    }
    if let Some(v) = so.min_power_floor {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(check.fail("solver", "min_power_floor", format!("must be >= 0, got {v}")));
        }
        solver.min_power_floor = v;
    }
    if let Some(v) = so.denominator_policy {
        solver.denominator_policy = v;
    }
    if let Some(v) = so.convention {
        scenario.convention = v;
    }

    let ex = &file.experiment;
    let seed = overrides.seed.or(ex.seed).unwrap_or(ScenarioConfig::DEFAULT_SEED);
    scenario.seed = seed;

    let sweep = ex.sweep.unwrap_or(SweepVariable::DropIndex);
    let sweep_values = match (sweep, &ex.sweep_values) {
        (SweepVariable::DropIndex, Some(_)) => {
            return Err(check.fail("experiment", "sweep_values", "only applies to sweep = \"ue_count\""));
        }
        (SweepVariable::DropIndex, None) => vec![scenario.ues_per_rbg],
        (SweepVariable::UeCount, None) => DEFAULT_UE_SWEEP.to_vec(),
        (SweepVariable::UeCount, Some(values)) => {
            if values.is_empty() {
                return Err(check.fail("experiment", "sweep_values", "must not be empty"));
            }
            if values.contains(&0) {
                return Err(check.fail("experiment", "sweep_values", "UE counts must be >= 1"));
            }
            values.clone()
        }
    };

    let solvers = match (&overrides.solvers, &ex.solvers) {
        (Some(list), _) => list.clone(),
        (None, Some(names)) => names
            .iter()
            .map(|n| n.parse::<SolverKind>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| check.fail("experiment", "solvers", e))?,
        (None, None) => DEFAULT_SOLVERS.to_vec(),
    };
    let solvers = dedup_solvers(solvers);
    if solvers.is_empty() {
        return Err(check.fail("experiment", "solvers", "must name at least one solver"));
    }
    if solvers.contains(&SolverKind::Oracle) {
        if let Some(&too_many) = sweep_values.iter().find(|&&v| v > MAX_ORACLE_UES) {
            return Err(check.fail(
                "experiment",
                "solvers",
                format!("oracle needs at most {MAX_ORACLE_UES} UEs per RBG, sweep reaches {too_many}"),
            ));
        }
    }

    let oracle_grid_points = ex.oracle_grid_points.unwrap_or(DEFAULT_ORACLE_GRID);
    if oracle_grid_points < 2 {
        return Err(check.fail("experiment", "oracle_grid_points", "must be >= 2"));
    }

    scenario.validate()?;

    Ok(ResolvedConfig {
        experiment: ExperimentSpec {
            preset,
            sweep,
            sweep_values,
            solvers,
            seed,
            oracle_grid_points,
        },
        scenario,
        solver,
    })
}

/// Parses a comma-separated solver list.
pub fn parse_solver_list(list: &str) -> Result<Vec<SolverKind>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

fn dedup_solvers(list: Vec<SolverKind>) -> Vec<SolverKind> {
    let mut out: Vec<SolverKind> = Vec::with_capacity(list.len());
    for k in list {
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out
}
