use std::fs;

use ntn_fp_core::sim::output::MANIFEST_FILE;
use ntn_fp_core::sim::{run_experiment, write_run, Overrides, RunOptions};
use ntn_fp_core::{parse_config, Error, Preset, SolverKind};

const SMALL: &str = r#"
[experiment]
preset = "S-MSB"
sweep = "ue_count"
sweep_values = [1, 2, 3]
solvers = ["alternate-fp", "conventional-fp", "wmmse", "oracle"]
oracle_grid_points = 11

[scenario]
bandwidth_hz = 2.52e6
drops = 3
"#;

#[test]
fn sweep_writes_every_artifact() {
    let cfg = parse_config(SMALL, &Overrides::default()).unwrap();
    let out = run_experiment(&cfg, RunOptions { dump_solutions: true }).unwrap();
    assert_eq!(out.rows.len(), 3 * 3 * 4);

    let dir = tempfile::tempdir().unwrap();
    let written = write_run(&[out], dir.path(), "ntn-fp-sim", "test").unwrap();
    let names: Vec<String> = written
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        ["S-MSB.csv", "S-MSB_per_beam.csv", "S-MSB_solutions.csv", "comparison.csv", MANIFEST_FILE]
    );

    let results = fs::read_to_string(dir.path().join("S-MSB.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 36);
    let solutions = fs::read_to_string(dir.path().join("S-MSB_solutions.csv")).unwrap();
    // 14 RBGs per drop
    assert_eq!(solutions.lines().count(), 1 + 3 * 3 * 4 * 14);
    let manifest = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
    assert!(manifest.contains("version = \"test\""));
    assert!(manifest.contains("sweep_values = [1, 2, 3]"), "{manifest}");
}

#[test]
fn oracle_never_loses_to_conventional_fp_by_more_than_grid_error() {
    let cfg = parse_config(SMALL, &Overrides::default()).unwrap();
    let out = run_experiment(&cfg, RunOptions::default()).unwrap();
    for fp in out.rows.iter().filter(|r| r.solver == SolverKind::ConventionalFp) {
        let oracle = out
            .rows
            .iter()
            .find(|r| r.solver == SolverKind::Oracle && r.drop_id == fp.drop_id && r.ue_count == fp.ue_count)
            .unwrap();
        // a coarse 11-point grid only bounds the continuous optimum loosely
        assert!(oracle.se_bits_s_hz >= 0.9 * fp.se_bits_s_hz, "{oracle:?} vs {fp:?}");
    }
}

#[test]
fn seed_changes_results() {
    let a = parse_config(SMALL, &Overrides::default()).unwrap();
    let b = parse_config(
        SMALL,
        &Overrides {
            seed: Some(1),
            ..Overrides::default()
        },
    )
    .unwrap();
    let ra = run_experiment(&a, RunOptions::default()).unwrap();
    let rb = run_experiment(&b, RunOptions::default()).unwrap();
    assert_ne!(ra.rows, rb.rows);
}

#[test]
fn empty_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(write_run(&[], dir.path(), "t", "0"), Err(Error::Domain(_))));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn presets_resolve_with_reference_shapes() {
    for preset in Preset::REFERENCE_SET {
        let cfg = parse_config("", &Overrides { preset: Some(preset), ..Overrides::default() }).unwrap();
        let plan = cfg.scenario.rbg_plan().unwrap();
        let expected = match preset {
            Preset::SSsb | Preset::SMsb => 166,
            _ => 2222,
        };
        assert_eq!(plan.rbg_count, expected, "{preset}");
        assert_eq!(cfg.scenario.beam_count, preset.beam_count().unwrap());
    }
}
