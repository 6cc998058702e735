// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Conversion between spectroscopic wavenumbers and angular frequencies.

use core::f64::consts::PI;

/// Speed of light in cm/ps.
pub const SPEED_OF_LIGHT_CM_PER_PS: f64 = 0.029_979_245_8;

/// Boltzmann constant in cm⁻¹/K.
pub const BOLTZMANN_CM_PER_K: f64 = 0.695_035;

/// The one place where cm⁻¹ and ps⁻¹ meet.
///
/// An energy `E` in cm⁻¹ corresponds to the angular frequency
/// `2πc·E` in ps⁻¹ (with ħ = 1). Rates that the literature quotes in cm⁻¹
/// go through the same factor.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UnitConvention {
    /// ps⁻¹ per cm⁻¹.
    pub angular_per_wavenumber: f64,
    /// cm⁻¹ per kelvin.
    pub boltzmann_wavenumber_per_kelvin: f64,
}

impl Default for UnitConvention {
    fn default() -> Self {
        Self {
            angular_per_wavenumber: 2.0 * PI * SPEED_OF_LIGHT_CM_PER_PS,
            boltzmann_wavenumber_per_kelvin: BOLTZMANN_CM_PER_K,
        }
    }
}

impl UnitConvention {
    #[inline]
    pub fn to_angular(&self, wavenumber: f64) -> f64 {
        wavenumber * self.angular_per_wavenumber
    }

    #[inline]
    pub fn to_wavenumber(&self, angular: f64) -> f64 {
        angular / self.angular_per_wavenumber
    }

    /// ħ in cm⁻¹·ps.
    pub fn hbar(&self) -> f64 {
        1.0 / self.angular_per_wavenumber
    }

    /// Thermal energy kT in cm⁻¹.
    pub fn thermal_energy(&self, kelvin: f64) -> f64 {
        kelvin * self.boltzmann_wavenumber_per_kelvin
    }
}
