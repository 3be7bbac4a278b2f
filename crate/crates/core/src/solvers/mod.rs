//! Per-RBG power allocation solvers sharing one problem description.

pub mod alternate;
pub mod conventional;
pub mod oracle;
pub mod problem;
pub mod wmmse;

pub use alternate::{solve_alternate_fp, AlternateFp, SolverState};
pub use conventional::{solve_conventional_fp, ConventionalFp};
pub use oracle::{brute_force_oracle, OracleSolution, MAX_ORACLE_UES};
pub use problem::{
    eval_utility, sinr, Association, DenominatorPolicy, GainConvention, PowerAllocation, ProblemInstance,
    SolverKind, SolverOptions, SolverReport,
};
pub use wmmse::{solve_wmmse, Wmmse};

use crate::error::Result;

/// Runs `kind` on `instance`. The oracle is wrapped into a one-iteration
/// report.
pub fn solve(kind: SolverKind, instance: &ProblemInstance, opts: &SolverOptions, oracle_grid: usize) -> Result<SolverReport> {
    Ok(match kind {
        SolverKind::AlternateFp => solve_alternate_fp(instance, opts),
        SolverKind::ConventionalFp => solve_conventional_fp(instance, opts),
        SolverKind::Wmmse => solve_wmmse(instance, opts),
        SolverKind::Oracle => {
            let best = brute_force_oracle(instance, oracle_grid)?;
            SolverReport {
                solver: SolverKind::Oracle,
                initial_utility: best.utility,
                utility_trace: vec![best.utility],
                surrogate_trace: Vec::new(),
                utility: best.utility,
                power: best.power,
                association: best.association,
                iterations: 1,
                converged: true,
            }
        }
    })
}
