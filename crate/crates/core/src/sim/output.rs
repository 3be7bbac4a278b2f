//! CSV and manifest writers.
//!
//! Floats are written with 17 significant digits so a CSV round-trips to the
//! exact `f64` values that produced it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::config::ResolvedConfig;
use crate::sim::experiment::{BeamRow, ExperimentOutput, ResultRow, SolutionRecord};
use crate::solvers::SolverKind;

pub const RESULTS_HEADER: [&str; 11] = [
    "scenario",
    "band",
    "beam_count",
    "drop_id",
    "solver",
    "ue_count",
    "se_bits_s_hz",
    "avg_rbg_rate_bits_s",
    "sum_rate_bits_s",
    "iterations",
    "converged",
];

pub const MANIFEST_FILE: &str = "run-manifest.toml";
pub const COMPARISON_FILE: &str = "comparison.csv";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_all<I>(path: &Path, header: &[&str], records: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in records {
        w.write_record(&r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// File-system friendly form of a scenario name.
pub fn file_stem(scenario: &str) -> String {
    scenario
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes one results CSV, sorted by scenario, UE count, drop and solver.
/// Refuses to create a file for zero rows.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::domain(format!("no result rows to write to {}", path.display())));
    }
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.scenario, a.ue_count, a.drop_id, a.solver.label()).cmp(&(&b.scenario, b.ue_count, b.drop_id, b.solver.label()))
    });
    write_all(
        path,
        &RESULTS_HEADER,
        sorted.into_iter().map(|r| {
            vec![
                r.scenario.clone(),
                r.band.to_string(),
                r.beam_count.to_string(),
                r.drop_id.to_string(),
                r.solver.label().to_string(),
                r.ue_count.to_string(),
                num(r.se_bits_s_hz),
                num(r.avg_rbg_rate_bits_s),
                num(r.sum_rate_bits_s),
                r.iterations.to_string(),
                r.converged.to_string(),
            ]
        }),
    )
}

pub fn emit_beam_csv(rows: &[BeamRow], path: &Path) -> Result<()> {
    write_all(
        path,
        &["scenario", "drop_id", "solver", "ue_count", "beam_id", "rbg_count", "se_bits_s_hz"],
        rows.iter().map(|r| {
            vec![
                r.scenario.clone(),
                r.drop_id.to_string(),
                r.solver.label().to_string(),
                r.ue_count.to_string(),
                r.beam_id.to_string(),
                r.rbg_count.to_string(),
                num(r.se_bits_s_hz),
            ]
        }),
    )
}

/// Per-RBG solutions; vector columns are `;`-separated.
pub fn emit_solutions_csv(records: &[SolutionRecord], path: &Path) -> Result<()> {
    write_all(
        path,
        &[
            "scenario",
            "drop_id",
            "solver",
            "ue_count",
            "beam_id",
            "rbg_id",
            "noise_power_w",
            "budget_w",
            "gains",
            "power_w",
            "active",
            "rates_bits_s_hz",
            "iterations",
            "converged",
        ],
        records.iter().map(|s| {
            vec![
                s.scenario.clone(),
                s.drop_id.to_string(),
                s.solver.label().to_string(),
                s.ue_count.to_string(),
                s.beam_id.to_string(),
                s.rbg_id.to_string(),
                num(s.noise_power_w),
                num(s.budget_w),
                join_f64(&s.gains),
                join_f64(&s.power_w),
                s.active.iter().map(|&a| u8::from(a).to_string()).collect::<Vec<_>>().join(";"),
                join_f64(&s.rates),
                s.iterations.to_string(),
                s.converged.to_string(),
            ]
        }),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub scenario: String,
    pub ue_count: usize,
    pub solver: SolverKind,
    pub drops: usize,
    pub mean_se_bits_s_hz: f64,
    pub mean_avg_rbg_rate_bits_s: f64,
    pub mean_sum_rate_bits_s: f64,
    /// Relative SE difference against conventional FP on the same points.
    pub se_vs_conventional_fp_pct: Option<f64>,
}

/// Drop-averaged metrics per (scenario, UE count, solver).
pub fn comparison_table(outputs: &[ExperimentOutput]) -> Vec<ComparisonRow> {
    let mut groups: BTreeMap<(String, usize, SolverKind), Vec<&ResultRow>> = BTreeMap::new();
    for row in outputs.iter().flat_map(|o| &o.rows) {
        groups
            .entry((row.scenario.clone(), row.ue_count, row.solver))
            .or_default()
            .push(row);
    }
    let mean = |rows: &[&ResultRow], f: fn(&ResultRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64;
    let mut table: Vec<ComparisonRow> = groups
        .iter()
        .map(|((scenario, ue_count, solver), rows)| ComparisonRow {
            scenario: scenario.clone(),
            ue_count: *ue_count,
            solver: *solver,
            drops: rows.len(),
            mean_se_bits_s_hz: mean(rows, |r| r.se_bits_s_hz),
            mean_avg_rbg_rate_bits_s: mean(rows, |r| r.avg_rbg_rate_bits_s),
            mean_sum_rate_bits_s: mean(rows, |r| r.sum_rate_bits_s),
            se_vs_conventional_fp_pct: None,
        })
        .collect();
    let baseline: BTreeMap<(String, usize), f64> = table
        .iter()
        .filter(|r| r.solver == SolverKind::ConventionalFp)
        .map(|r| ((r.scenario.clone(), r.ue_count), r.mean_se_bits_s_hz))
        .collect();
    for r in &mut table {
        if let Some(&b) = baseline.get(&(r.scenario.clone(), r.ue_count)) {
            if b > 0.0 {
                r.se_vs_conventional_fp_pct = Some(100.0 * (r.mean_se_bits_s_hz - b) / b);
            }
        }
    }
    table
}

pub fn emit_comparison_csv(table: &[ComparisonRow], path: &Path) -> Result<()> {
    write_all(
        path,
        &[
            "scenario",
            "ue_count",
            "solver",
            "drops",
            "mean_se_bits_s_hz",
            "mean_avg_rbg_rate_bits_s",
            "mean_sum_rate_bits_s",
            "se_vs_conventional_fp_pct",
        ],
        table.iter().map(|r| {
            vec![
                r.scenario.clone(),
                r.ue_count.to_string(),
                r.solver.label().to_string(),
                r.drops.to_string(),
                num(r.mean_se_bits_s_hz),
                num(r.mean_avg_rbg_rate_bits_s),
                num(r.mean_sum_rate_bits_s),
                r.se_vs_conventional_fp_pct.map(num).unwrap_or_default(),
            ]
        }),
    )
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    #[serde(rename = "run")]
    runs: Vec<&'a ResolvedConfig>,
}

/// TOML manifest listing the tool version and every resolved config.
pub fn render_manifest(outputs: &[ExperimentOutput], tool: &str, version: &str) -> String {
    let manifest = Manifest {
        tool,
        version,
        runs: outputs.iter().map(|o| &o.config).collect(),
    };
    toml::to_string(&manifest).expect("manifest serializes")
}

/// Writes every artifact of a run into `dir` and returns the paths written.
pub fn write_run(outputs: &[ExperimentOutput], dir: &Path, tool: &str, version: &str) -> Result<Vec<PathBuf>> {
    if outputs.iter().all(|o| o.rows.is_empty()) {
        return Err(Error::domain("experiment produced no rows"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for out in outputs {
        let stem = file_stem(&out.config.scenario.name);
        let path = dir.join(format!("{stem}.csv"));
        emit_csv(&out.rows, &path)?;
        written.push(path);
        if !out.beam_rows.is_empty() {
            let path = dir.join(format!("{stem}_per_beam.csv"));
            emit_beam_csv(&out.beam_rows, &path)?;
            written.push(path);
        }
        if !out.solutions.is_empty() {
            let path = dir.join(format!("{stem}_solutions.csv"));
            emit_solutions_csv(&out.solutions, &path)?;
            written.push(path);
        }
    }
    let path = dir.join(COMPARISON_FILE);
    emit_comparison_csv(&comparison_table(outputs), &path)?;
    written.push(path);
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, render_manifest(outputs, tool, version)).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}
