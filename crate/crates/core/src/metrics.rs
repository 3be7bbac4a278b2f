//! Rate metrics: spectral efficiency, average RBG rate and total sum rate.
//!
//! Spectral efficiency is the mean over RBGs of the per-RBG sum rate, in
//! bits/s/Hz. The average RBG rate scales it by the RBG bandwidth, and the
//! total sum rate adds every occupied RBG, so
//! `total_sum_rate = spectral_efficiency * K * rbg_bandwidth`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solvers::{sinr, Association, PowerAllocation, ProblemInstance};

/// Per-UE rates of one (beam, RBG), bits/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Self {
        Self(rates)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// `R_j = alpha_j log2(1 + SINR_j)`.
pub fn rbg_rates(instance: &ProblemInstance, power: &PowerAllocation, association: &Association) -> RateVector {
    RateVector(
        (0..instance.ue_count())
            .map(|j| {
                if association.is_active(j) {
                    (1.0 + sinr(instance, power, j)).log2()
                } else {
                    0.0
                }
            })
            .collect(),
    )
}

fn non_empty(rates: &[RateVector]) -> Result<()> {
    if rates.is_empty() {
        Err(Error::domain("rate metrics need at least one RBG"))
    } else {
        Ok(())
    }
}

/// Mean per-RBG sum rate, bits/s/Hz.
pub fn spectral_efficiency(rates: &[RateVector]) -> Result<f64> {
    non_empty(rates)?;
    Ok(rates.iter().map(RateVector::sum).sum::<f64>() / rates.len() as f64)
}

/// Spectral efficiency times the RBG bandwidth, bits/s.
pub fn avg_rbg_rate(rates: &[RateVector], rbg_bandwidth_hz: f64) -> Result<f64> {
    Ok(spectral_efficiency(rates)? * rbg_bandwidth_hz)
}

/// Sum of every UE rate over every RBG of every beam, bits/s.
pub fn total_sum_rate(rates: &[RateVector], rbg_bandwidth_hz: f64) -> Result<f64> {
    non_empty(rates)?;
    Ok(rates.iter().map(RateVector::sum).sum::<f64>() * rbg_bandwidth_hz)
}
