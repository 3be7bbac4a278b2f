//! Closed-form fractional-programming baseline for scalar sum-rate power
//! control (Lagrangian dual transform followed by the quadratic transform).
//!
//! Every iteration is a minorize-maximize step on the sum rate, so the
//! utility trace never decreases.

use super::problem::{
    eval_utility, project_onto_budget, sinr, Association, PowerAllocation, ProblemInstance, SolverKind,
    SolverOptions, SolverReport,
};

#[derive(Debug, Clone)]
pub struct ConventionalFp<'a> {
    instance: &'a ProblemInstance,
    opts: SolverOptions,
    power: PowerAllocation,
    association: Association,
    initial_utility: f64,
    trace: Vec<f64>,
    converged: bool,
}

impl<'a> ConventionalFp<'a> {
    pub fn new(instance: &'a ProblemInstance, opts: SolverOptions) -> Self {
        let power = PowerAllocation::uniform(instance);
        let association = Association::all_active(instance.ue_count());
        let initial_utility = eval_utility(instance, &power, &association);
        Self {
            instance,
            opts,
            power,
            association,
            initial_utility,
            trace: Vec::new(),
            converged: false,
        }
    }

    pub fn power(&self) -> &PowerAllocation {
        &self.power
    }

    pub fn step(&mut self) -> f64 {
        let inst = self.instance;
        let j_count = inst.ue_count();
        let p = self.power.as_slice();

        let gamma: Vec<f64> = (0..j_count).map(|j| sinr(inst, &self.power, j)).collect();
        let y: Vec<f64> = (0..j_count)
            .map(|j| {
                let a = inst.signal(p, j);
                let b = inst.interference_plus_noise(p, j);
                ((1.0 + gamma[j]) * a).sqrt() / (a + b)
            })
            .collect();

        let mut next: Vec<f64> = (0..j_count)
            .map(|j| {
                // total weighted gain of stream j over all receivers
                let c: f64 = (0..j_count).map(|k| y[k] * y[k] * inst.cross_gain(k, j)).sum();
                if c > 0.0 {
                    y[j] * y[j] * (1.0 + gamma[j]) * inst.gains()[j] / (c * c)
                } else {
                    0.0
                }
            })
            .collect();
        project_onto_budget(&mut next, &self.association, inst.power_budget(), false);
        self.power = PowerAllocation::new(next);

        let utility = eval_utility(inst, &self.power, &self.association);
        let previous = self.trace.last().copied().unwrap_or(self.initial_utility);
        self.converged = self.opts.has_converged(previous, utility);
        self.trace.push(utility);
        utility
    }

    pub fn run(mut self) -> SolverReport {
        while self.trace.len() < self.opts.max_iterations && !self.converged {
            self.step();
        }
        let utility = eval_utility(self.instance, &self.power, &self.association);
        SolverReport {
            solver: SolverKind::ConventionalFp,
            power: self.power,
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

pub fn solve_conventional_fp(instance: &ProblemInstance, opts: &SolverOptions) -> SolverReport {
    ConventionalFp::new(instance, *opts).run()
}
