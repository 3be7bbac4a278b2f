//! Scalar weighted-MMSE sum-rate power control.

use super::problem::{
    eval_utility, Association, PowerAllocation, ProblemInstance, SolverKind, SolverOptions, SolverReport,
};

#[derive(Debug, Clone)]
pub struct Wmmse<'a> {
    instance: &'a ProblemInstance,
    opts: SolverOptions,
    /// Transmit amplitudes, `p = v^2`.
    amplitude: Vec<f64>,
    weights: Vec<f64>,
    association: Association,
    initial_utility: f64,
    trace: Vec<f64>,
    converged: bool,
}

impl<'a> Wmmse<'a> {
    pub fn new(instance: &'a ProblemInstance, opts: SolverOptions) -> Self {
        let j = instance.ue_count();
        let amplitude = vec![(instance.power_budget() / j as f64).sqrt(); j];
        let association = Association::all_active(j);
        let initial_utility = eval_utility(instance, &to_power(&amplitude), &association);
        Self {
            instance,
            opts,
            amplitude,
            weights: vec![1.0; j],
            association,
            initial_utility,
            trace: Vec::new(),
            converged: false,
        }
    }

    pub fn power(&self) -> PowerAllocation {
        to_power(&self.amplitude)
    }

    /// MSE weights from the latest receiver update.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn step(&mut self) -> f64 {
        let inst = self.instance;
        let n = inst.ue_count();
        let h: Vec<f64> = inst.gains().iter().map(|g| g.sqrt()).collect();
        let v = &self.amplitude;

        let receiver: Vec<f64> = (0..n)
            .map(|j| {
                let received: f64 = (0..n).map(|k| inst.cross_gain(j, k) * v[k] * v[k]).sum();
                h[j] * v[j] / (received + inst.noise_power())
            })
            .collect();
        let weights: Vec<f64> = (0..n)
            .map(|j| 1.0 / (1.0 - receiver[j] * h[j] * v[j]))
            .collect();

        let mut next: Vec<f64> = (0..n)
            .map(|j| {
                let denom: f64 = (0..n)
                    .map(|k| weights[k] * receiver[k] * receiver[k] * inst.cross_gain(k, j))
                    .sum();
                if denom > 0.0 {
                    weights[j] * receiver[j] * h[j] / denom
                } else {
                    0.0
                }
            })
            .collect();
        for a in next.iter_mut() {
            if !(a.is_finite() && *a > 0.0) {
                *a = 0.0;
            }
        }
        let total: f64 = next.iter().map(|a| a * a).sum();
        if total > inst.power_budget() {
            let scale = (inst.power_budget() / total).sqrt();
            next.iter_mut().for_each(|a| *a *= scale);
        }
        self.amplitude = next;
        self.weights = weights;

        let utility = eval_utility(inst, &self.power(), &self.association);
        let previous = self.trace.last().copied().unwrap_or(self.initial_utility);
        self.converged = self.opts.has_converged(previous, utility);
        self.trace.push(utility);
        utility
    }

    pub fn run(mut self) -> SolverReport {
        while self.trace.len() < self.opts.max_iterations && !self.converged {
            self.step();
        }
        let power = self.power();
        let utility = eval_utility(self.instance, &power, &self.association);
        SolverReport {
            solver: SolverKind::Wmmse,
            power,
            association: self.association,
            utility,
            initial_utility: self.initial_utility,
            iterations: self.trace.len(),
            utility_trace: self.trace,
            surrogate_trace: Vec::new(),
            converged: self.converged,
        }
    }
}

fn to_power(amplitude: &[f64]) -> PowerAllocation {
    PowerAllocation::new(amplitude.iter().map(|v| v * v).collect())
}

pub fn solve_wmmse(instance: &ProblemInstance, opts: &SolverOptions) -> SolverReport {
    Wmmse::new(instance, *opts).run()
}
