use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which channel gain scales the co-channel interference seen by UE `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainConvention {
    /// Every superposed stream reaches UE `j` through UE `j`'s own channel:
    /// `B_j = g_j * sum_{j' != j} p_j' + noise`.
    #[default]
    VictimGain,
    /// Interference from stream `j'` is scaled by `g_j'`:
    /// `B_j = sum_{j' != j} p_j' * g_j' + noise`.
    InterfererGain,
}

/// One per-(beam, RBG) power allocation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    gains: Vec<f64>,
    noise_power: f64,
    power_budget: f64,
    convention: GainConvention,
}

impl ProblemInstance {
    pub fn new(gains: Vec<f64>, noise_power: f64, power_budget: f64, convention: GainConvention) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::domain("problem instance needs at least one UE"));
        }
        if let Some(g) = gains.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::domain(format!("channel gains must be positive and finite, got {g}")));
        }
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(Error::domain(format!("noise power must be positive, got {noise_power}")));
        }
        if !(power_budget > 0.0 && power_budget.is_finite()) {
            return Err(Error::domain(format!("power budget must be positive, got {power_budget}")));
        }
        Ok(Self {
            gains,
            noise_power,
            power_budget,
            convention,
        })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn power_budget(&self) -> f64 {
        self.power_budget
    }

    pub fn convention(&self) -> GainConvention {
        self.convention
    }

    pub fn ue_count(&self) -> usize {
        self.gains.len()
    }

    /// Same gains and noise under a different interference convention.
    pub fn with_convention(&self, convention: GainConvention) -> Self {
        Self {
            convention,
            ..self.clone()
        }
    }

    /// Gain applied to stream `stream` when it arrives at receiver `receiver`.
    pub fn cross_gain(&self, receiver: usize, stream: usize) -> f64 {
        if receiver == stream {
            return self.gains[receiver];
        }
        match self.convention {
            GainConvention::VictimGain => self.gains[receiver],
            GainConvention::InterfererGain => self.gains[stream],
        }
    }

    /// Received useful power `A_j = p_j * g_j`.
    pub fn signal(&self, power: &[f64], j: usize) -> f64 {
        power[j] * self.gains[j]
    }

    /// Interference-plus-noise `B_j` under the instance's convention.
    pub fn interference_plus_noise(&self, power: &[f64], j: usize) -> f64 {
        let interference: f64 = power
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(k, p)| p * self.cross_gain(j, k))
            .sum();
        interference + self.noise_power
    }

    /// `(A, B)` vectors at `power`.
    pub fn signal_terms(&self, power: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (0..self.ue_count())
            .map(|j| (self.signal(power, j), self.interference_plus_noise(power, j)))
            .unzip()
    }
}

/// Per-UE transmit powers in watts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerAllocation(Vec<f64>);

impl PowerAllocation {
    pub fn new(powers: Vec<f64>) -> Self {
        Self(powers)
    }

    pub fn uniform(instance: &ProblemInstance) -> Self {
        let j = instance.ue_count();
        Self(vec![instance.power_budget() / j as f64; j])
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum_j alpha_j * p_j`.
    pub fn active_total(&self, association: &Association) -> f64 {
        self.0
            .iter()
            .zip(association.as_slice())
            .filter(|(_, a)| **a)
            .map(|(p, _)| p)
            .sum()
    }

    pub fn is_feasible(&self, association: &Association, budget: f64) -> bool {
        self.0.iter().all(|p| *p >= 0.0 && p.is_finite()) && self.active_total(association) <= budget + 1e-9
    }
}

impl std::ops::Index<usize> for PowerAllocation {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

/// Binary UE-to-RBG association flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Association(Vec<bool>);

impl Association {
    pub fn new(active: Vec<bool>) -> Self {
        Self(active)
    }

    pub fn all_active(len: usize) -> Self {
        Self(vec![true; len])
    }

    pub fn none_active(len: usize) -> Self {
        Self(vec![false; len])
    }

    /// Active exactly where the allocated power is positive.
    pub fn from_power(power: &PowerAllocation) -> Self {
        Self(power.as_slice().iter().map(|p| *p > 0.0).collect())
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn is_active(&self, j: usize) -> bool {
        self.0[j]
    }

    /// `alpha_j` as a number.
    pub fn weight(&self, j: usize) -> f64 {
        if self.0[j] {
            1.0
        } else {
            0.0
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.0.iter().filter(|a| **a).count()
    }
}

/// What the alternate solver does when the power update's denominator
/// `g_j - sum_{j' != j} g_j'` is not positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorPolicy {
    /// Zero the UE's power.
    #[default]
    Clamp,
    /// Use the magnitude of the denominator.
    Absolute,
    /// Keep the UE's previous power.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub rel_tolerance: f64,
    pub epsilon_guard: f64,
    pub min_power_floor: f64,
    pub denominator_policy: DenominatorPolicy,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            rel_tolerance: 1e-6,
            epsilon_guard: 1e-12,
            min_power_floor: 0.0,
            denominator_policy: DenominatorPolicy::Clamp,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::config("solver.max_iterations must be >= 1"));
        }
        if self.rel_tolerance.is_nan() || self.rel_tolerance <= 0.0 {
            return Err(Error::config("solver.rel_tolerance must be > 0"));
        }
        if self.epsilon_guard.is_nan() || self.epsilon_guard <= 0.0 {
            return Err(Error::config("solver.epsilon_guard must be > 0"));
        }
        if !(self.min_power_floor >= 0.0 && self.min_power_floor.is_finite()) {
            return Err(Error::config("solver.min_power_floor must be >= 0"));
        }
        Ok(())
    }

    pub(crate) fn has_converged(&self, previous: f64, current: f64) -> bool {
        (current - previous).abs() / current.abs().max(1.0) < self.rel_tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    AlternateFp,
    ConventionalFp,
    Wmmse,
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::AlternateFp,
        SolverKind::ConventionalFp,
        SolverKind::Wmmse,
        SolverKind::Oracle,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SolverKind::AlternateFp => "alternate-fp",
            SolverKind::ConventionalFp => "conventional-fp",
            SolverKind::Wmmse => "wmmse",
            SolverKind::Oracle => "oracle",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.label() == s.trim())
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown solver `{s}`, expected one of alternate-fp, conventional-fp, wmmse, oracle"
                ))
            })
    }
}

/// Outcome of a solver run on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub solver: SolverKind,
    pub power: PowerAllocation,
    pub association: Association,
    /// Sum-rate utility of the final `(power, association)`.
    pub utility: f64,
    /// Utility at the starting point, before the first iteration.
    pub initial_utility: f64,
    /// Utility after each iteration.
    pub utility_trace: Vec<f64>,
    /// Quadratic-transform surrogate after each iteration (alternate FP only).
    pub surrogate_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// SINR of UE `j`.
pub fn sinr(instance: &ProblemInstance, power: &PowerAllocation, j: usize) -> f64 {
    let p = power.as_slice();
    instance.signal(p, j) / instance.interference_plus_noise(p, j)
}

/// Weighted sum rate `sum_j alpha_j log2(1 + SINR_j)` in bits/s/Hz.
pub fn eval_utility(instance: &ProblemInstance, power: &PowerAllocation, association: &Association) -> f64 {
    (0..instance.ue_count())
        .filter(|&j| association.is_active(j))
        .map(|j| (1.0 + sinr(instance, power, j)).log2())
        .sum()
}

/// Replaces negative or non-finite powers by zero and, when the active total
/// exceeds the budget, rescales the whole vector uniformly onto it. With
/// `fill` set a positive total below the budget is scaled up to it as well.
pub(crate) fn project_onto_budget(power: &mut [f64], association: &Association, budget: f64, fill: bool) {
    for p in power.iter_mut() {
        if !(p.is_finite() && *p > 0.0) {
            *p = 0.0;
        }
    }
    let total: f64 = power
        .iter()
        .zip(association.as_slice())
        .filter(|(_, a)| **a)
        .map(|(p, _)| p)
        .sum();
    if total > budget || (fill && total > 0.0) {
        let scale = budget / total;
        for p in power.iter_mut() {
            *p = (*p * scale).min(budget);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(gains: &[f64], noise: f64, budget: f64) -> ProblemInstance {
        ProblemInstance::new(gains.to_vec(), noise, budget, GainConvention::VictimGain).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(ProblemInstance::new(vec![], 1.0, 1.0, GainConvention::VictimGain).is_err());
        assert!(ProblemInstance::new(vec![0.0], 1.0, 1.0, GainConvention::VictimGain).is_err());
        assert!(ProblemInstance::new(vec![1.0], 0.0, 1.0, GainConvention::VictimGain).is_err());
        assert!(ProblemInstance::new(vec![1.0], 1.0, -1.0, GainConvention::VictimGain).is_err());
    }

    #[test]
    fn single_ue_sinr_one() {
        let i = inst(&[2.0], 0.5, 1.0);
        let p = PowerAllocation::new(vec![0.25]);
        assert_eq!(sinr(&i, &p, 0), 1.0);
        assert_eq!(eval_utility(&i, &p, &Association::all_active(1)), 1.0);
    }

    #[test]
    fn two_ue_sinr() {
        let i = inst(&[1.0, 1.0], 0.1, 1.0);
        let p = PowerAllocation::new(vec![0.2, 0.1]);
        assert!((sinr(&i, &p, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn silent_ue_has_zero_sinr() {
        let i = inst(&[1.0, 0.5], 0.1, 1.0);
        let p = PowerAllocation::new(vec![1.0, 0.0]);
        assert_eq!(sinr(&i, &p, 1), 0.0);
    }

    #[test]
    fn utility_examples() {
        let i = inst(&[1.0, 0.5], 0.1, 1.0);
        let p = PowerAllocation::new(vec![1.0, 0.0]);
        assert_eq!(eval_utility(&i, &p, &Association::none_active(2)), 0.0);
        let u = eval_utility(&i, &p, &Association::all_active(2));
        assert!((u - 11f64.log2()).abs() < 1e-12);
        assert!((u - 3.4594).abs() < 1e-4);
    }

    #[test]
    fn conventions_differ_only_with_interference() {
        let victim = inst(&[1.0, 0.5], 0.1, 1.0);
        let interferer = victim.with_convention(GainConvention::InterfererGain);
        let p = PowerAllocation::new(vec![0.4, 0.6]);
        // UE 0: victim 0.4/(0.6+0.1), interferer 0.4/(0.3+0.1)
        assert!((sinr(&victim, &p, 0) - 0.4 / 0.7).abs() < 1e-15);
        assert!((sinr(&interferer, &p, 0) - 1.0).abs() < 1e-15);

        let single = inst(&[0.3], 0.1, 1.0);
        let q = PowerAllocation::new(vec![0.7]);
        assert_eq!(
            sinr(&single, &q, 0),
            sinr(&single.with_convention(GainConvention::InterfererGain), &q, 0)
        );
    }

    #[test]
    fn projection_caps_and_clears() {
        let alpha = Association::all_active(3);
        let mut p = vec![-1.0, f64::NAN, 0.5];
        project_onto_budget(&mut p, &alpha, 1.0, false);
        assert_eq!(p, vec![0.0, 0.0, 0.5]);

        let mut p = vec![3.0, 1.0, 0.0];
        project_onto_budget(&mut p, &alpha, 1.0, false);
        assert_eq!(p, vec![0.75, 0.25, 0.0]);

        let mut p = vec![0.2, 0.3, 0.0];
        project_onto_budget(&mut p, &alpha, 1.0, true);
        assert!((p[0] - 0.4).abs() < 1e-15 && (p[1] - 0.6).abs() < 1e-15);

        let mut p = vec![0.0; 3];
        project_onto_budget(&mut p, &alpha, 1.0, true);
        assert_eq!(p, vec![0.0; 3]);
    }

    #[test]
    fn solver_labels_round_trip() {
        for k in SolverKind::ALL {
            assert_eq!(k.label().parse::<SolverKind>().unwrap(), k);
        }
        assert!("gradient".parse::<SolverKind>().is_err());
    }
}
