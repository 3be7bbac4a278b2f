//! Alternate fractional-programming power allocation.
//!
//! Each iteration refreshes the quadratic-transform auxiliaries `y`, the
//! Lagrangian-dual auxiliaries `x` (the current SINRs), and then updates the
//! powers and UE association together. The loop stops once the surrogate
//! objective `f3` settles.
//!
//! The closed-form updates contain square roots and divisions that are not
//! well defined for every state (SINR below one, `A_j <= B_j`, interferer
//! gains exceeding the UE's own gain). Those cases are guarded: negative
//! square-root arguments contribute zero, and undefined or negative powers
//! are clamped to zero.

use super::problem::{
    eval_utility, project_onto_budget, Association, DenominatorPolicy, PowerAllocation, ProblemInstance,
    SolverKind, SolverOptions, SolverReport,
};

/// Lagrangian-dual auxiliaries: the SINR of every active UE, zero otherwise.
pub fn update_x(instance: &ProblemInstance, power: &PowerAllocation, association: &Association) -> Vec<f64> {
    let p = power.as_slice();
    (0..instance.ue_count())
        .map(|j| {
            if association.is_active(j) {
                instance.signal(p, j) / instance.interference_plus_noise(p, j)
            } else {
                0.0
            }
        })
        .collect()
}

/// Quadratic-transform auxiliaries `y_j = sqrt(alpha_j x_j / (A_j - B_j))`.
///
/// Returns `y` together with a flag per UE that is set when `A_j - B_j` is not
/// above `epsilon_guard * B_j`; such UEs get `y_j = 0`.
pub fn update_y(
    association: &Association,
    x: &[f64],
    signal: &[f64],
    interference: &[f64],
    opts: &SolverOptions,
) -> (Vec<f64>, Vec<bool>) {
    (0..x.len())
        .map(|j| {
            let margin = signal[j] - interference[j];
            if !association.is_active(j) {
                (0.0, false)
            } else if margin > opts.epsilon_guard * interference[j] {
                ((x[j] / margin).max(0.0).sqrt(), false)
            } else {
                (0.0, true)
            }
        })
        .unzip()
}

/// Closed-form power update
/// `p_j = g_j alpha_j (x_j - 1) / (y_j^2 (g_j - sum_{j' != j} g_j'))`,
/// followed by projection onto the power budget.
///
/// `previous` is only read under [`DenominatorPolicy::Skip`].
pub fn update_p(
    instance: &ProblemInstance,
    association: &Association,
    x: &[f64],
    y: &[f64],
    previous: &PowerAllocation,
    opts: &SolverOptions,
) -> PowerAllocation {
    let gains = instance.gains();
    let gain_total: f64 = gains.iter().sum();
    let mut power: Vec<f64> = (0..instance.ue_count())
        .map(|j| {
            if !association.is_active(j) {
                return 0.0;
            }
            let others = gain_total - gains[j];
            let mut denom_gain = gains[j] - others;
            if denom_gain <= opts.epsilon_guard * gains[j] {
                match opts.denominator_policy {
                    DenominatorPolicy::Clamp => return opts.min_power_floor,
                    DenominatorPolicy::Skip => return previous[j],
                    DenominatorPolicy::Absolute => denom_gain = denom_gain.abs(),
                }
            }
            if y[j] == 0.0 || x[j] < 1.0 || denom_gain == 0.0 {
                return opts.min_power_floor;
            }
            let denom = y[j] * y[j] * denom_gain;
            let raw = gains[j] * (x[j] - 1.0) / denom;
            if raw.is_finite() {
                raw.max(opts.min_power_floor)
            } else {
                opts.min_power_floor
            }
        })
        .collect();
    project_onto_budget(&mut power, association, instance.power_budget(), false);
    PowerAllocation::new(power)
}

/// Per-UE association score, evaluated under the hypothesis that the UE is
/// active:
/// `log2(1 + x_j) - x_j + 2 y_j sqrt((x_j - 1) A_j) - y_j^2 (A_j - B_j)`.
pub fn association_score(x: f64, y: f64, signal: f64, interference: f64) -> f64 {
    (1.0 + x).log2() - x + 2.0 * y * ((x - 1.0) * signal).max(0.0).sqrt() - y * y * (signal - interference)
}

/// UE `j` stays associated iff its score is strictly positive.
pub fn update_alpha(x: &[f64], y: &[f64], signal: &[f64], interference: &[f64]) -> Association {
    Association::new(
        (0..x.len())
            .map(|j| association_score(x[j], y[j], signal[j], interference[j]) > 0.0)
            .collect(),
    )
}

/// Quadratic-transform surrogate `f3` with per-UE `y`.
pub fn eval_f3(
    instance: &ProblemInstance,
    power: &PowerAllocation,
    association: &Association,
    x: &[f64],
    y: &[f64],
) -> f64 {
    let (signal, interference) = instance.signal_terms(power.as_slice());
    (0..instance.ue_count())
        .map(|j| {
            let a = association.weight(j);
            a * (1.0 + x[j]).log2() - a * x[j] + 2.0 * y[j] * (a * (x[j] - 1.0) * signal[j]).max(0.0).sqrt()
                - y[j] * y[j] * (signal[j] - interference[j])
        })
        .sum()
}

/// Full iterate of the alternate solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub power: PowerAllocation,
    pub association: Association,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `A_j` at `power`.
    pub signal: Vec<f64>,
    /// `B_j` at `power`.
    pub interference: Vec<f64>,
    pub interference_dominated: Vec<bool>,
    pub surrogate_trace: Vec<f64>,
    pub utility_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Stepwise driver for the alternate FP iteration.
#[derive(Debug, Clone)]
pub struct AlternateFp<'a> {
    instance: &'a ProblemInstance,
    opts: SolverOptions,
    state: SolverState,
    initial_utility: f64,
}

impl<'a> AlternateFp<'a> {
    /// Uniform powers, every UE associated, `x` at the resulting SINRs.
    pub fn new(instance: &'a ProblemInstance, opts: SolverOptions) -> Self {
        let j = instance.ue_count();
        let power = PowerAllocation::uniform(instance);
        let association = Association::all_active(j);
        let x = update_x(instance, &power, &association);
        let (signal, interference) = instance.signal_terms(power.as_slice());
        let initial_utility = eval_utility(instance, &power, &association);
        Self {
            instance,
            opts,
            state: SolverState {
                power,
                association,
                x,
                y: vec![0.0; j],
                signal,
                interference,
                interference_dominated: vec![false; j],
                surrogate_trace: Vec::new(),
                utility_trace: Vec::new(),
                iterations: 0,
                converged: false,
            },
            initial_utility,
        }
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    /// One pass of the y / x / (p, alpha) updates. Returns the new `f3`.
    pub fn step(&mut self) -> f64 {
        let instance = self.instance;
        let opts = &self.opts;
        let st = &mut self.state;

        let (y, dominated) = update_y(&st.association, &st.x, &st.signal, &st.interference, opts);
        st.y = y;
        st.interference_dominated = dominated;

        st.x = update_x(instance, &st.power, &st.association);

        let mut power = update_p(instance, &st.association, &st.x, &st.y, &st.power, opts);
        let association = update_alpha(&st.x, &st.y, &st.signal, &st.interference);
        for (p, active) in power.as_mut_slice().iter_mut().zip(association.as_slice()) {
            if !active {
                *p = 0.0;
            }
        }
        // scaling every stream up never lowers a SINR, so spend the whole budget
        project_onto_budget(power.as_mut_slice(), &association, instance.power_budget(), true);

        st.power = power;
        st.association = association;
        let (signal, interference) = instance.signal_terms(st.power.as_slice());
        st.signal = signal;
        st.interference = interference;

        let f3 = eval_f3(instance, &st.power, &st.association, &st.x, &st.y);
        if let Some(&prev) = st.surrogate_trace.last() {
            st.converged = opts.has_converged(prev, f3);
        }
        st.surrogate_trace.push(f3);
        st.utility_trace
            .push(eval_utility(instance, &st.power, &st.association));
        st.iterations += 1;
        f3
    }

    pub fn run(mut self) -> SolverReport {
        while self.state.iterations < self.opts.max_iterations && !self.state.converged {
            self.step();
        }
        self.into_report()
    }

    fn into_report(self) -> SolverReport {
        let st = self.state;
        let utility = eval_utility(self.instance, &st.power, &st.association);
        SolverReport {
            solver: SolverKind::AlternateFp,
            power: st.power,
            association: st.association,
            utility,
            initial_utility: self.initial_utility,
            utility_trace: st.utility_trace,
            surrogate_trace: st.surrogate_trace,
            iterations: st.iterations,
            converged: st.converged,
        }
    }
}

pub fn solve_alternate_fp(instance: &ProblemInstance, opts: &SolverOptions) -> SolverReport {
    AlternateFp::new(instance, *opts).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::problem::{sinr, GainConvention};

    fn inst(gains: &[f64], noise: f64, budget: f64) -> ProblemInstance {
        ProblemInstance::new(gains.to_vec(), noise, budget, GainConvention::VictimGain).unwrap()
    }

    #[test]
    fn x_is_the_sinr() {
        let i = inst(&[1.0, 1.0], 0.1, 1.0);
        let p = PowerAllocation::new(vec![0.2, 0.1]);
        let alpha = Association::all_active(2);
        let x = update_x(&i, &p, &alpha);
        assert!((x[0] - 1.0).abs() < 1e-15);
        for (j, xj) in x.iter().enumerate() {
            assert_eq!(*xj, sinr(&i, &p, j));
        }
        let single = inst(&[1.0], 1.0, 10.0);
        assert_eq!(update_x(&single, &PowerAllocation::new(vec![3.0]), &Association::all_active(1)), vec![3.0]);
        assert_eq!(update_x(&i, &p, &Association::new(vec![false, true]))[0], 0.0);
    }

    #[test]
    fn y_examples() {
        let opts = SolverOptions::default();
        let (y, dom) = update_y(&Association::all_active(1), &[2.0], &[3.0], &[1.0], &opts);
        assert_eq!(y, vec![1.0]);
        assert_eq!(dom, vec![false]);

        let (y, _) = update_y(&Association::none_active(1), &[2.0], &[3.0], &[1.0], &opts);
        assert_eq!(y, vec![0.0]);

        let (y, dom) = update_y(&Association::all_active(1), &[2.0], &[1.0], &[1.0], &opts);
        assert_eq!(y, vec![0.0]);
        assert_eq!(dom, vec![true]);
    }

    #[test]
    fn p_example() {
        let opts = SolverOptions::default();
        let alpha = Association::all_active(2);
        let prev = PowerAllocation::zeros(2);
        // UE 0: 1 * (2 - 1) / (1 * (1 - 0.5)) = 2; UE 1 has a negative denominator
        let wide = inst(&[1.0, 0.5], 0.1, 5.0);
        let p = update_p(&wide, &alpha, &[2.0, 2.0], &[1.0, 1.0], &prev, &opts);
        assert_eq!(p.as_slice(), &[2.0, 0.0]);

        let tight = inst(&[1.0, 0.5], 0.1, 1.0);
        let p = update_p(&tight, &alpha, &[2.0, 2.0], &[1.0, 1.0], &prev, &opts);
        assert_eq!(p.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn p_zero_at_unit_sinr() {
        let i = inst(&[1.0, 0.5], 0.1, 5.0);
        let p = update_p(
            &i,
            &Association::all_active(2),
            &[1.0, 0.0],
            &[1.0, 1.0],
            &PowerAllocation::zeros(2),
            &SolverOptions::default(),
        );
        assert_eq!(p[0], 0.0);
    }

    #[test]
    fn p_denominator_policies() {
        let i = inst(&[1.0, 0.5], 0.1, 5.0);
        let alpha = Association::all_active(2);
        let prev = PowerAllocation::new(vec![0.3, 0.7]);
        let x = [2.0, 3.0];
        let y = [1.0, 1.0];
        let mut opts = SolverOptions {
            denominator_policy: DenominatorPolicy::Skip,
            ..SolverOptions::default()
        };
        let p = update_p(&i, &alpha, &x, &y, &prev, &opts);
        assert_eq!(p.as_slice(), &[2.0, 0.7]);

        // UE 1: 0.5 * 2 / |0.5 - 1| = 2
        opts.denominator_policy = DenominatorPolicy::Absolute;
        let p = update_p(&i, &alpha, &x, &y, &prev, &opts);
        assert_eq!(p.as_slice(), &[2.0, 2.0]);
    }

    #[test]
    fn alpha_example() {
        let e1 = association_score(3.0, 1.0, 4.0, 1.0);
        // 2 - 3 + 2 sqrt(8) - 3
        assert!((e1 - (2.0 * 8f64.sqrt() - 4.0)).abs() < 1e-12);
        assert!((e1 - 1.657).abs() < 1e-3);
        assert_eq!(update_alpha(&[3.0], &[1.0], &[4.0], &[1.0]).as_slice(), &[true]);
    }

    #[test]
    fn alpha_boundary_is_inactive() {
        // silent UE with y = 0 scores exactly zero
        assert_eq!(association_score(0.0, 0.0, 0.0, 1.0), 0.0);
        assert_eq!(update_alpha(&[0.0], &[0.0], &[0.0], &[1.0]).as_slice(), &[false]);
        // y > 0 with A = 0 scores y^2 B > 0
        assert!(association_score(0.0, 0.5, 0.0, 1.0) > 0.0);
    }

    #[test]
    fn alpha_sqrt_guard() {
        // x < 1: the square-root term vanishes
        let x = 0.5;
        let expected = (1.5f64).log2() - 0.5 - 0.25 * (2.0 - 1.0);
        assert!((association_score(x, 0.5, 2.0, 1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn f3_examples() {
        let i = inst(&[1.0], 1.0, 10.0);
        // A = 4 with g = 1 at p = 4, B = noise = 1
        let p = PowerAllocation::new(vec![4.0]);
        let f3 = eval_f3(&i, &p, &Association::all_active(1), &[3.0], &[1.0]);
        assert!((f3 - association_score(3.0, 1.0, 4.0, 1.0)).abs() < 1e-12);

        let two = inst(&[1.0, 0.5], 0.1, 1.0);
        let f = eval_f3(
            &two,
            &PowerAllocation::new(vec![0.5, 0.5]),
            &Association::none_active(2),
            &[0.0, 0.0],
            &[0.0, 0.0],
        );
        assert_eq!(f, 0.0);
    }

    #[test]
    fn f3_is_stationary_in_y() {
        let i = inst(&[1.0, 0.2], 0.05, 1.0);
        let p = PowerAllocation::new(vec![0.8, 0.2]);
        let alpha = Association::all_active(2);
        let x = update_x(&i, &p, &alpha);
        let (a, b) = i.signal_terms(p.as_slice());
        let (y, dom) = update_y(&alpha, &x, &a, &b, &SolverOptions::default());
        assert!(!dom[0]);
        let h = 1e-6;
        let mut up = y.clone();
        up[0] += h;
        let mut down = y.clone();
        down[0] -= h;
        let grad = (eval_f3(&i, &p, &alpha, &x, &up) - eval_f3(&i, &p, &alpha, &x, &down)) / (2.0 * h);
        assert!(grad.abs() < 1e-6, "{grad}");
    }

    #[test]
    fn single_ue_reaches_full_power() {
        let i = inst(&[0.7], 0.1, 2.0);
        let report = solve_alternate_fp(&i, &SolverOptions::default());
        assert!((report.power[0] - 2.0).abs() < 1e-12);
        assert!(report.association.is_active(0));
        assert!((report.utility - (1.0 + 2.0 * 0.7 / 0.1f64).log2()).abs() < 1e-12);
        assert!(report.converged);
    }

    #[test]
    fn trace_bounded_and_feasible() {
        let opts = SolverOptions {
            max_iterations: 7,
            ..SolverOptions::default()
        };
        let i = inst(&[1.0, 0.9, 0.8, 0.3], 0.01, 1.0);
        let mut solver = AlternateFp::new(&i, opts);
        for _ in 0..7 {
            solver.step();
            let st = solver.state();
            assert!(st.power.is_feasible(&st.association, 1.0));
            assert!(st.x.iter().all(|x| *x >= 0.0));
        }
        let report = solve_alternate_fp(&i, &opts);
        assert!(report.surrogate_trace.len() <= 7);
        assert_eq!(report.utility, eval_utility(&i, &report.power, &report.association));
    }
}
