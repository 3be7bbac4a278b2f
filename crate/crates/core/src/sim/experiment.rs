//! Runs every (sweep point, drop, solver) combination of a resolved config.
//!
//! Work is spread over the rayon pool, but each row is reduced sequentially
//! in a fixed order, so output does not depend on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::BandLabel;
use crate::error::Result;
use crate::metrics::{avg_rbg_rate, rbg_rates, spectral_efficiency, total_sum_rate, RateVector};
use crate::scenario::{Deployment, RbgInstance};
use crate::sim::config::ResolvedConfig;
use crate::solvers::{solve, SolverKind, SolverReport};

/// One line of the results CSV: a solver's metrics on one drop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub scenario: String,
    pub band: BandLabel,
    pub beam_count: usize,
    pub drop_id: usize,
    pub solver: SolverKind,
    pub ue_count: usize,
    pub se_bits_s_hz: f64,
    pub avg_rbg_rate_bits_s: f64,
    pub sum_rate_bits_s: f64,
    /// Largest iteration count over the drop's RBG problems.
    pub iterations: usize,
    /// Whether every RBG problem of the drop converged.
    pub converged: bool,
}

/// Spectral efficiency of a single beam on one drop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamRow {
    pub scenario: String,
    pub drop_id: usize,
    pub solver: SolverKind,
    pub ue_count: usize,
    pub beam_id: usize,
    pub rbg_count: usize,
    pub se_bits_s_hz: f64,
}

/// Solver output for one RBG problem, kept when solutions are dumped.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub scenario: String,
    pub drop_id: usize,
    pub solver: SolverKind,
    pub ue_count: usize,
    pub beam_id: usize,
    pub rbg_id: usize,
    pub noise_power_w: f64,
    pub budget_w: f64,
    pub gains: Vec<f64>,
    pub power_w: Vec<f64>,
    pub active: Vec<bool>,
    pub rates: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub config: ResolvedConfig,
    pub rows: Vec<ResultRow>,
    pub beam_rows: Vec<BeamRow>,
    pub solutions: Vec<SolutionRecord>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub dump_solutions: bool,
}

struct DropResult {
    rows: Vec<ResultRow>,
    beam_rows: Vec<BeamRow>,
    solutions: Vec<SolutionRecord>,
}

fn solve_drop(
    config: &ResolvedConfig,
    deployment: &Deployment,
    ue_count: usize,
    drop_id: usize,
    opts: RunOptions,
) -> Result<DropResult> {
    let instances: Vec<RbgInstance> = deployment.build_drop(drop_id)?;
    let scenario = &config.scenario;
    let rbg_bw = deployment.plan.rbg_bandwidth_hz;
    let mut out = DropResult {
        rows: Vec::new(),
        beam_rows: Vec::new(),
        solutions: Vec::new(),
    };

    for &kind in &config.experiment.solvers {
        let reports: Vec<SolverReport> = instances
            .par_iter()
            .map(|r| solve(kind, &r.instance, &config.solver, config.experiment.oracle_grid_points))
            .collect::<Result<_>>()?;
        let rates: Vec<RateVector> = instances
            .iter()
            .zip(&reports)
            .map(|(r, rep)| rbg_rates(&r.instance, &rep.power, &rep.association))
            .collect();

        out.rows.push(ResultRow {
            scenario: scenario.name.clone(),
            band: scenario.band.label,
            beam_count: scenario.beam_count,
            drop_id,
            solver: kind,
            ue_count,
            se_bits_s_hz: spectral_efficiency(&rates)?,
            avg_rbg_rate_bits_s: avg_rbg_rate(&rates, rbg_bw)?,
            sum_rate_bits_s: total_sum_rate(&rates, rbg_bw)?,
            iterations: reports.iter().map(|r| r.iterations).max().unwrap_or(0),
            converged: reports.iter().all(|r| r.converged),
        });

        for beam in &deployment.beams {
            let beam_rates: Vec<RateVector> = instances
                .iter()
                .zip(&rates)
                .filter(|(r, _)| r.beam_id == beam.id)
                .map(|(_, v)| v.clone())
                .collect();
            if beam_rates.is_empty() {
                continue;
            }
            out.beam_rows.push(BeamRow {
                scenario: scenario.name.clone(),
                drop_id,
                solver: kind,
                ue_count,
                beam_id: beam.id,
                rbg_count: beam_rates.len(),
                se_bits_s_hz: spectral_efficiency(&beam_rates)?,
            });
        }

        if opts.dump_solutions {
            for ((inst, rep), rate) in instances.iter().zip(&reports).zip(&rates) {
                out.solutions.push(SolutionRecord {
                    scenario: scenario.name.clone(),
                    drop_id,
                    solver: kind,
                    ue_count,
                    beam_id: inst.beam_id,
                    rbg_id: inst.rbg_id,
                    noise_power_w: inst.instance.noise_power(),
                    budget_w: inst.instance.power_budget(),
                    gains: inst.instance.gains().to_vec(),
                    power_w: rep.power.as_slice().to_vec(),
                    active: (0..rep.power.len()).map(|j| rep.association.is_active(j)).collect(),
                    rates: rate.as_slice().to_vec(),
                    iterations: rep.iterations,
                    converged: rep.converged,
                });
            }
        }
    }
    Ok(out)
}

/// Runs the full experiment. Rows come out ordered by sweep value, drop and
/// solver position in the config.
pub fn run_experiment(config: &ResolvedConfig, opts: RunOptions) -> Result<ExperimentOutput> {
    let mut output = ExperimentOutput {
        config: config.clone(),
        rows: Vec::new(),
        beam_rows: Vec::new(),
        solutions: Vec::new(),
    };
    for &ue_count in &config.experiment.sweep_values {
        let mut scenario = config.scenario.clone();
        scenario.ues_per_rbg = ue_count;
        let deployment = Deployment::new(&scenario)?;
        let point = ResolvedConfig {
            scenario,
            ..config.clone()
        };
        let drops: Vec<DropResult> = (0..point.scenario.drops)
            .into_par_iter()
            .map(|d| solve_drop(&point, &deployment, ue_count, d, opts))
            .collect::<Result<_>>()?;
        for d in drops {
            output.rows.extend(d.rows);
            output.beam_rows.extend(d.beam_rows);
            output.solutions.extend(d.solutions);
        }
    }
    Ok(output)
}
