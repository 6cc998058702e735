// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Transfer efficiency, mean transfer time and loss probability.
//!
//! The probability of capture at site m during `[t, t + dt]` is
//! `2κ_m ρ_mm(t) dt`, so with `S1 = ∫ρ dt` and `S2 = ∫tρ dt`:
//!
//! ```text
//! η    = 2 Σ_m κ_m S1_mm
//! τ    = (2/η) Σ_m κ_m S2_mm
//! loss = 2Γ Σ_m S1_mm
//! ```

use alloc::format;
use alloc::vec::Vec;

use crate::dynamics::{integrated_state, IntegratedState};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{DensityMatrix, TransportSystem};

/// Slack allowed outside `[0, 1]` before a probability is rejected.
pub const PROBABILITY_SLACK: f64 = 1e-8;

/// Efficiencies at or below this have no meaningful transfer time.
pub const MIN_EFFICIENCY_FOR_TIME: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransportResult {
    pub efficiency: f64,
    /// `None` when the efficiency is too small for τ to be defined.
    pub transfer_time: Option<f64>,
    pub loss_probability: f64,
    /// `∫ρ_mm dt` per site, ps.
    pub site_integrals: Vec<f64>,
}

fn weighted_diagonal(weights: &[f64], s: &CMatrix) -> f64 {
    weights.iter().enumerate().map(|(m, &w)| w * s[(m, m)].re).sum()
}

fn clamp_probability(what: &str, p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        return Ok(p);
    }
    if (-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        log::warn!("{what} {p:e} clamped to [0, 1]");
        return Ok(p.clamp(0.0, 1.0));
    }
    Err(Error::NumericalConsistency(format!("{what} {p} lies outside [0, 1]")))
}

pub(crate) fn clamp_efficiency(eta: f64) -> Result<f64> {
    clamp_probability("efficiency", eta)
}

/// `η = 2 Σ κ_m S1_mm`.
pub fn efficiency(sys: &TransportSystem, s1: &CMatrix) -> Result<f64> {
    clamp_probability("efficiency", 2.0 * weighted_diagonal(sys.trap_rates(), s1))
}

/// `τ = (2/η) Σ κ_m S2_mm`, in ps.
pub fn transfer_time(sys: &TransportSystem, s2: &CMatrix, eta: f64) -> Result<f64> {
    if !(eta > MIN_EFFICIENCY_FOR_TIME) {
        return Err(Error::UndefinedTransferTime(eta));
    }
    Ok(2.0 * weighted_diagonal(sys.trap_rates(), s2) / eta)
}

/// `2Γ Σ S1_mm`.
pub fn loss_probability(sys: &TransportSystem, s1: &CMatrix) -> f64 {
    let trace: f64 = (0..s1.nrows()).map(|m| s1[(m, m)].re).sum();
    2.0 * sys.recomb_rate() * trace
}

impl TransportResult {
    pub fn from_integrals(sys: &TransportSystem, s: &IntegratedState) -> Result<Self> {
        let efficiency = efficiency(sys, &s.first)?;
        let transfer_time = if efficiency > MIN_EFFICIENCY_FOR_TIME {
            Some(transfer_time(sys, &s.second, efficiency)?)
        } else {
            None
        };
        Ok(Self {
            efficiency,
            transfer_time,
            loss_probability: loss_probability(sys, &s.first),
            site_integrals: s.site_integrals(),
        })
    }
}

/// Solves the integrals and evaluates every observable.
pub fn evaluate(sys: &TransportSystem, rho0: &DensityMatrix) -> Result<TransportResult> {
    TransportResult::from_integrals(sys, &integrated_state(sys, rho0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InitialState;
    use alloc::vec;

    fn chain(traps: Vec<f64>, recomb: f64, gamma: f64) -> TransportSystem {
        TransportSystem::new(
            vec![0.0, 20.0, -10.0],
            vec![vec![0.0, 30.0, 0.0], vec![30.0, 0.0, 25.0], vec![0.0, 25.0, 0.0]],
            traps,
            recomb,
            gamma,
        )
        .unwrap()
    }

    #[test]
    fn no_traps_means_no_efficiency_and_full_loss() {
        let sys = chain(vec![0.0; 3], 0.2, 1.0);
        let rho0 = InitialState::Site(1).density_matrix(3).unwrap();
        let r = evaluate(&sys, &rho0).unwrap();
        assert_eq!(r.efficiency, 0.0);
        assert!(r.transfer_time.is_none());
        assert!((r.loss_probability - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lossless_trapping_is_complete() {
        let sys = chain(vec![0.0, 0.0, 1.0], 0.0, 0.0);
        let rho0 = InitialState::Site(1).density_matrix(3).unwrap();
        let r = evaluate(&sys, &rho0).unwrap();
        assert!((r.efficiency - 1.0).abs() < 1e-8, "{}", r.efficiency);
        assert_eq!(r.loss_probability, 0.0);
    }

    #[test]
    fn single_trapped_site_mean_time() {
        let sys = TransportSystem::new(vec![0.0], vec![vec![0.0]], vec![0.5], 0.0, 0.0).unwrap();
        let rho0 = InitialState::Site(1).density_matrix(1).unwrap();
        let r = evaluate(&sys, &rho0).unwrap();
        assert!((r.efficiency - 1.0).abs() < 1e-12);
        assert!((r.transfer_time.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conservation_on_mixed_sinks() {
        for &g in &[0.0, 0.1, 1.0, 10.0, 1000.0] {
            let sys = chain(vec![0.3, 0.0, 1.0], 0.05, g);
            let rho0 = InitialState::Superposition(vec![1, 2]).density_matrix(3).unwrap();
            let r = evaluate(&sys, &rho0).unwrap();
            assert!((r.efficiency + r.loss_probability - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn undefined_transfer_time_and_inconsistent_efficiency() {
        let sys = chain(vec![0.0, 0.0, 1.0], 0.0, 0.0);
        let s = CMatrix::identity(3, 3);
        assert!(matches!(transfer_time(&sys, &s, 0.0), Err(Error::UndefinedTransferTime(_))));
        assert!(matches!(efficiency(&sys, &s), Err(Error::NumericalConsistency(_))));
        let nearly = CMatrix::identity(3, 3) * num_complex::Complex64::new(0.5 + 1e-9, 0.0);
        assert_eq!(efficiency(&sys, &nearly).unwrap(), 1.0);
    }

    #[test]
    fn stronger_trap_helps_below_coupling_scale() {
        // V = 20 cm⁻¹ is about 3.8 ps⁻¹; far above that the trap freezes
        // the donor instead.
        let mut last = 0.0;
        for i in 0..16 {
            let kappa = 0.01 * libm::pow(10.0, i as f64 * 0.15);
            let sys = TransportSystem::new(
                vec![0.0, 0.0],
                vec![vec![0.0, 20.0], vec![20.0, 0.0]],
                vec![0.0, kappa],
                0.01,
                1.0,
            )
            .unwrap();
            let rho0 = InitialState::Site(1).density_matrix(2).unwrap();
            let eta = evaluate(&sys, &rho0).unwrap().efficiency;
            assert!(eta >= last - 1e-12, "kappa {kappa}: {eta} < {last}");
            last = eta;
        }
    }
}
