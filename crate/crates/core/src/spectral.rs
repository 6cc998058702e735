// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Ohmic bath with exponential cutoff and the Markovian dephasing rate it
//! implies.

use alloc::format;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::UnitConvention;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OhmicBath {
    /// E_R, cm⁻¹.
    pub reorganization_energy: f64,
    /// ω_c, cm⁻¹.
    pub cutoff: f64,
}

impl Default for OhmicBath {
    fn default() -> Self {
        Self { reorganization_energy: 35.0, cutoff: 150.0 }
    }
}

/// A dephasing rate in both unit systems.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DephasingRate {
    pub wavenumber: f64,
    pub angular: f64,
}

impl OhmicBath {
    pub fn new(reorganization_energy: f64, cutoff: f64) -> Result<Self> {
        if !(reorganization_energy > 0.0 && reorganization_energy.is_finite()) {
            return Err(Error::Domain(format!(
                "reorganization energy must be positive, got {reorganization_energy}"
            )));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::Domain(format!("cutoff must be positive, got {cutoff}")));
        }
        Ok(Self { reorganization_energy, cutoff })
    }

    /// `J(ω) = (E_R/ω_c) ω e^{−ω/ω_c}` with ω in cm⁻¹.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!("frequency must be >= 0, got {omega}")));
        }
        Ok(self.reorganization_energy / self.cutoff * omega * libm::exp(-omega / self.cutoff))
    }

    /// `γ_φ(T) = 2π kT · J'(0) = 2π kT E_R/ω_c`, linear in T.
    pub fn dephasing_rate(&self, kelvin: f64, units: &UnitConvention) -> Result<DephasingRate> {
        if !(kelvin > 0.0 && kelvin.is_finite()) {
            return Err(Error::Domain(format!("temperature must be positive, got {kelvin}")));
        }
        let wavenumber =
            2.0 * PI * units.thermal_energy(kelvin) * self.reorganization_energy / self.cutoff;
        Ok(DephasingRate { wavenumber, angular: units.to_angular(wavenumber) })
    }
}
