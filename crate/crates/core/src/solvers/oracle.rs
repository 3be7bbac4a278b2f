//! Exhaustive grid search over power allocations, for verifying the
//! iterative solvers on small instances.

use super::problem::{eval_utility, Association, PowerAllocation, ProblemInstance};
use crate::error::{Error, Result};

pub const MAX_ORACLE_UES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub power: PowerAllocation,
    pub association: Association,
    pub utility: f64,
}

/// Searches `p_j in {0, P/(n-1), ..., P}` for every UE, keeping points with
/// `sum p <= P`, and returns the best utility with `alpha = [p > 0]`.
///
/// Ties keep the first point in lexicographic grid order.
pub fn brute_force_oracle(instance: &ProblemInstance, grid_points_per_dim: usize) -> Result<OracleSolution> {
    let j = instance.ue_count();
    if j > MAX_ORACLE_UES {
        return Err(Error::domain(format!(
            "brute-force oracle supports at most {MAX_ORACLE_UES} UEs, got {j}"
        )));
    }
    if grid_points_per_dim < 2 {
        return Err(Error::domain("brute-force oracle needs at least 2 grid points per dimension"));
    }
    let steps = grid_points_per_dim - 1;
    let level = |i: usize| instance.power_budget() * i as f64 / steps as f64;

    let mut idx = vec![0usize; j];
    let mut best: Option<OracleSolution> = None;
    loop {
        // integer budget test avoids float round-off on the simplex boundary
        if idx.iter().sum::<usize>() <= steps {
            let power = PowerAllocation::new(idx.iter().map(|&i| level(i)).collect());
            let association = Association::from_power(&power);
            let utility = eval_utility(instance, &power, &association);
            if best.as_ref().is_none_or(|b| utility > b.utility) {
                best = Some(OracleSolution {
                    power,
                    association,
                    utility,
                });
            }
        }
        // odometer increment
        let mut d = j;
        loop {
            if d == 0 {
                return Ok(best.expect("grid contains the origin"));
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = 0;
        }
    }
}
