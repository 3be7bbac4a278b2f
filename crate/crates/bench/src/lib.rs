//! Benchmark fixtures.

use ntn_fp_core::{Deployment, Preset, ProblemInstance, ScenarioConfig};

/// Deployment of `preset` with `ues_per_rbg` UEs sharing each RBG.
pub fn deployment(preset: Preset, ues_per_rbg: usize) -> Deployment {
    let mut config = ScenarioConfig::preset(preset).expect("named preset");
    config.ues_per_rbg = ues_per_rbg;
    Deployment::new(&config).expect("preset is valid")
}

/// The first `count` RBG problems of drop 0.
pub fn instances(preset: Preset, ues_per_rbg: usize, count: usize) -> Vec<ProblemInstance> {
    deployment(preset, ues_per_rbg)
        .build_drop(0)
        .expect("drop builds")
        .into_iter()
        .take(count)
        .map(|r| r.instance)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let set = instances(Preset::SSsb, 3, 8);
        assert_eq!(set.len(), 8);
        assert!(set.iter().all(|i| i.ue_count() == 3));
    }
}
