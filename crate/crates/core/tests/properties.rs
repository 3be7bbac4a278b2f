use ntn_fp_core::solvers::{
    brute_force_oracle, eval_utility, solve, solve_alternate_fp, solve_conventional_fp, solve_wmmse, Association,
    PowerAllocation,
};
use ntn_fp_core::{GainConvention, ProblemInstance, SolverKind, SolverOptions};
use proptest::prelude::*;

fn gains(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len).prop_map(|v| v.into_iter().map(|e| 10f64.powf(e)).collect())
}

fn instance(ues: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ProblemInstance> {
    (gains(ues), -2.0f64..0.0, -1.0f64..1.0).prop_map(|(g, n, p)| {
        ProblemInstance::new(g, 10f64.powf(n), 10f64.powf(p), GainConvention::VictimGain).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn utility_is_invariant_to_common_gain_scaling(
        inst in instance(1..=5),
        shares in prop::collection::vec(0.0f64..1.0, 5),
        scale in -6.0f64..6.0,
    ) {
        let c = 10f64.powf(scale);
        let power = PowerAllocation::new(shares[..inst.ue_count()].iter().map(|s| s * inst.power_budget()).collect());
        let assoc = Association::all_active(inst.ue_count());
        let scaled = ProblemInstance::new(
            inst.gains().iter().map(|g| g * c).collect(),
            inst.noise_power() * c,
            inst.power_budget(),
            inst.convention(),
        ).unwrap();
        let a = eval_utility(&inst, &power, &assoc);
        let b = eval_utility(&scaled, &power, &assoc);
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn conventions_agree_for_a_single_ue(g in -3.0f64..3.0, n in -3.0f64..0.0, p in -1.0f64..1.0) {
        let victim = ProblemInstance::new(vec![10f64.powf(g)], 10f64.powf(n), 10f64.powf(p), GainConvention::VictimGain).unwrap();
        let interferer = victim.with_convention(GainConvention::InterfererGain);
        let opts = SolverOptions::default();
        for kind in SolverKind::ALL {
            let a = solve(kind, &victim, &opts, 21).unwrap();
            let b = solve(kind, &interferer, &opts, 21).unwrap();
            prop_assert_eq!(a.power, b.power);
            prop_assert_eq!(a.utility, b.utility);
        }
    }

    #[test]
    fn every_solver_respects_the_budget(inst in instance(1..=6)) {
        let opts = SolverOptions::default();
        let budget = inst.power_budget();
        for report in [solve_alternate_fp(&inst, &opts), solve_conventional_fp(&inst, &opts), solve_wmmse(&inst, &opts)] {
            prop_assert!(report.power.as_slice().iter().all(|p| p.is_finite() && *p >= 0.0));
            prop_assert!(report.power.active_total(&report.association) <= budget * (1.0 + 1e-9));
            prop_assert!(report.iterations <= opts.max_iterations);
            prop_assert_eq!(report.utility, eval_utility(&inst, &report.power, &report.association));
        }
    }

    #[test]
    fn fine_oracle_is_not_beaten_by_much(inst in instance(2..=2)) {
        let opts = SolverOptions::default();
        let oracle = brute_force_oracle(&inst, 201).unwrap().utility;
        for report in [solve_alternate_fp(&inst, &opts), solve_conventional_fp(&inst, &opts), solve_wmmse(&inst, &opts)] {
            // grid spacing P/200 bounds how far a continuous solver can get ahead
            prop_assert!(report.utility <= oracle * 1.01 + 1e-12, "{:?} {} > {}", report.solver, report.utility, oracle);
        }
    }

    #[test]
    fn oracle_refinement_never_hurts(inst in instance(2..=3)) {
        let coarse = brute_force_oracle(&inst, 6).unwrap().utility;
        let fine = brute_force_oracle(&inst, 11).unwrap().utility;
        prop_assert!(fine >= coarse);
    }
}

#[test]
fn victim_convention_prefers_the_strongest_ue() {
    // all streams reach a UE through its own channel, so superposition only
    // adds self-interference; the best single UE is optimal in this regime
    let inst = ProblemInstance::new(vec![4.0, 1.0], 0.1, 1.0, GainConvention::VictimGain).unwrap();
    let r = solve_conventional_fp(&inst, &SolverOptions::default());
    let best = (1.0f64 + 4.0 / 0.1).log2();
    assert!((r.utility - best).abs() < 1e-3 * best, "{}", r.utility);
}

#[test]
fn alternate_fp_silences_weak_groups_under_victim_gains() {
    // uniform start gives SINR < 1 to every UE, which zeroes every power update
    let inst = ProblemInstance::new(vec![1.0, 0.9, 0.8], 0.01, 1.0, GainConvention::VictimGain).unwrap();
    let r = solve_alternate_fp(&inst, &SolverOptions::default());
    assert_eq!(r.power.active_total(&r.association), 0.0);
    assert_eq!(r.utility, 0.0);
    assert!(r.converged);
}
