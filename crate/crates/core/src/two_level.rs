// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed forms for the two-site system `H = ε/2 σ_z + V/2 σ_x`.
//!
//! Diagonalising H gives a level splitting `ħΩ = √(ε² + V²)` and the Rabi
//! population `P₂(t) = (V²/(ε² + V²)) sin²(Ωt/2)` for an excitation that
//! starts on site 1. With `θ = asin(V/ħΩ)` the maximum of `P₂` is `sin²θ`.

use alloc::format;
use alloc::vec;

use crate::error::{Error, Result};
use crate::model::TransportSystem;
use crate::units::UnitConvention;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    /// ε, cm⁻¹.
    pub energy_mismatch: f64,
    /// V, cm⁻¹.
    pub coupling: f64,
    /// γ_φ, ps⁻¹.
    pub dephasing: f64,
    pub units: UnitConvention,
}

impl TwoLevelParams {
    pub fn new(energy_mismatch: f64, coupling: f64, dephasing: f64) -> Result<Self> {
        if !energy_mismatch.is_finite() || !coupling.is_finite() {
            return Err(Error::Domain("ε and V must be finite".into()));
        }
        if !(dephasing >= 0.0) || !dephasing.is_finite() {
            return Err(Error::Domain(format!("dephasing must be >= 0, got {dephasing}")));
        }
        Ok(Self { energy_mismatch, coupling, dephasing, units: UnitConvention::default() })
    }

    /// `√(ε² + V²)` in cm⁻¹.
    fn splitting(&self) -> f64 {
        libm::hypot(self.energy_mismatch, self.coupling)
    }

    /// Ω in ps⁻¹ (angular).
    pub fn larmor_frequency(&self) -> f64 {
        self.units.to_angular(self.splitting())
    }

    /// Tilt of the rotation axis from z, `asin(V/ħΩ)`; zero when V = 0.
    pub fn tilt_angle(&self) -> f64 {
        let s = self.splitting();
        if s == 0.0 {
            return 0.0;
        }
        libm::asin((self.coupling.abs() / s).min(1.0))
    }

    /// Largest site-2 population reached by coherent motion, `V²/(ε²+V²)`.
    pub fn max_coherent_population_2(&self) -> f64 {
        let s2 = self.energy_mismatch * self.energy_mismatch + self.coupling * self.coupling;
        if s2 == 0.0 {
            0.0
        } else {
            self.coupling * self.coupling / s2
        }
    }

    /// Rabi population of site 2 at time `t` (ps), starting from site 1.
    /// Only meaningful without dephasing.
    pub fn coherent_population_2(&self, t: f64) -> Result<f64> {
        if self.dephasing != 0.0 {
            return Err(Error::Domain("the Rabi formula requires γ_φ = 0".into()));
        }
        let s = libm::sin(0.5 * self.larmor_frequency() * t);
        Ok(self.max_coherent_population_2() * s * s)
    }

    /// Order-of-magnitude diffusion time `(π/θ)²/γ_φ` in ps. Infinite when
    /// the sites are decoupled.
    pub fn diffusion_time_estimate(&self) -> Result<f64> {
        if !(self.dephasing > 0.0) {
            return Err(Error::UndefinedEstimate("diffusion time needs γ_φ > 0".into()));
        }
        let theta = self.tilt_angle();
        if theta == 0.0 {
            return Ok(f64::INFINITY);
        }
        let steps = core::f64::consts::PI / theta;
        Ok(steps * steps / self.dephasing)
    }

    /// Stationary site-2 population under dephasing without sinks.
    pub fn equilibrium_population_2(&self) -> Result<f64> {
        if self.coupling == 0.0 {
            return Err(Error::NoMixing);
        }
        if !(self.dephasing > 0.0) {
            return Err(Error::Domain("a unique stationary state needs γ_φ > 0".into()));
        }
        Ok(0.5)
    }

    /// The equivalent general transport system (no sinks): site energies
    /// `±ε/2`, coupling `V/2`.
    pub fn transport_system(&self) -> Result<TransportSystem> {
        self.transport_system_with_sinks([0.0, 0.0], 0.0)
    }

    pub fn transport_system_with_sinks(&self, traps: [f64; 2], recomb: f64) -> Result<TransportSystem> {
        let half = 0.5 * self.coupling;
        TransportSystem::new(
            vec![0.5 * self.energy_mismatch, -0.5 * self.energy_mismatch],
            vec![vec![0.0, half], vec![half, 0.0]],
            traps.to_vec(),
            recomb,
            self.dephasing,
        )
        .map(|s| s.with_units(self.units))
    }
}
