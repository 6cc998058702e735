// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Transport problem definition: tight-binding Hamiltonian, sinks and
//! dephasing, plus the initial states used by the studies.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, CMatrix, ZERO};
use crate::units::UnitConvention;

/// A single-excitation transport problem.
///
/// Energies and couplings are stored in cm⁻¹ exactly as supplied; rates are
/// stored in ps⁻¹. The conversion to the internal ħ = 1 frequency scale
/// happens in [`TransportSystem::effective_hamiltonian`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransportSystem {
    site_energies: Vec<f64>,
    couplings: DMatrix<f64>,
    trap_rates: Vec<f64>,
    recomb_rate: f64,
    dephasing_rate: f64,
    units: UnitConvention,
}

fn check_rate(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::Config(format!("{name} must be finite and >= 0, got {value}")));
    }
    Ok(())
}

impl TransportSystem {
    /// Builds and validates a system. `couplings` is a full symmetric
    /// matrix given row by row.
    pub fn new(
        site_energies: Vec<f64>,
        couplings: Vec<Vec<f64>>,
        trap_rates: Vec<f64>,
        recomb_rate: f64,
        dephasing_rate: f64,
    ) -> Result<Self> {
        let n = site_energies.len();
        if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
            return Err(Error::Config(format!(
                "couplings must be a {n}x{n} matrix to match {n} site energies"
            )));
        }
        let matrix = DMatrix::from_fn(n, n, |r, c| couplings[r][c]);
        Self::from_matrix(site_energies, matrix, trap_rates, recomb_rate, dephasing_rate)
    }

    pub fn from_matrix(
        site_energies: Vec<f64>,
        couplings: DMatrix<f64>,
        trap_rates: Vec<f64>,
        recomb_rate: f64,
        dephasing_rate: f64,
    ) -> Result<Self> {
        let n = site_energies.len();
        if n == 0 {
            return Err(Error::Config("a transport system needs at least one site".into()));
        }
        if couplings.nrows() != n || couplings.ncols() != n {
            return Err(Error::Config(format!(
                "couplings are {}x{}, expected {n}x{n}",
                couplings.nrows(),
                couplings.ncols()
            )));
        }
        if trap_rates.len() != n {
            return Err(Error::Config(format!(
                "trap_rates has {} entries, expected {n}",
                trap_rates.len()
            )));
        }
        if let Some(e) = site_energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::Config(format!("site energy {e} is not finite")));
        }
        for r in 0..n {
            if couplings[(r, r)] != 0.0 {
                return Err(Error::Config(format!(
                    "coupling diagonal must be zero, found V[{0}][{0}] = {1}",
                    r + 1,
                    couplings[(r, r)]
                )));
            }
            for c in (r + 1)..n {
                let (a, b) = (couplings[(r, c)], couplings[(c, r)]);
                if !a.is_finite() || a != b {
                    return Err(Error::Config(format!(
                        "couplings must be finite and symmetric: V[{}][{}] = {a}, V[{}][{}] = {b}",
                        r + 1,
                        c + 1,
                        c + 1,
                        r + 1
                    )));
                }
            }
        }
        for (m, &k) in trap_rates.iter().enumerate() {
            check_rate(&format!("trap_rates[{}]", m + 1), k)?;
        }
        check_rate("recomb_rate", recomb_rate)?;
        check_rate("dephasing_rate", dephasing_rate)?;
        Ok(Self {
            site_energies,
            couplings,
            trap_rates,
            recomb_rate,
            dephasing_rate,
            units: UnitConvention::default(),
        })
    }

    pub fn with_units(mut self, units: UnitConvention) -> Self {
        self.units = units;
        self
    }

    /// Copy of the system with a different dephasing rate.
    pub fn with_dephasing(&self, dephasing_rate: f64) -> Result<Self> {
        check_rate("dephasing_rate", dephasing_rate)?;
        let mut s = self.clone();
        s.dephasing_rate = dephasing_rate;
        Ok(s)
    }

    /// Copy of the system with new trap rates.
    pub fn with_trap_rates(&self, trap_rates: Vec<f64>) -> Result<Self> {
        Self::from_matrix(
            self.site_energies.clone(),
            self.couplings.clone(),
            trap_rates,
            self.recomb_rate,
            self.dephasing_rate,
        )
        .map(|s| s.with_units(self.units))
    }

    pub fn with_recomb_rate(&self, recomb_rate: f64) -> Result<Self> {
        check_rate("recomb_rate", recomb_rate)?;
        let mut s = self.clone();
        s.recomb_rate = recomb_rate;
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        self.site_energies.len()
    }
    pub fn site_energies(&self) -> &[f64] {
        &self.site_energies
    }
    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }
    pub fn trap_rates(&self) -> &[f64] {
        &self.trap_rates
    }
    pub fn recomb_rate(&self) -> f64 {
        self.recomb_rate
    }
    pub fn dephasing_rate(&self) -> f64 {
        self.dephasing_rate
    }
    pub fn units(&self) -> &UnitConvention {
        &self.units
    }

    /// True when at least one sink (trap or recombination) is present.
    pub fn has_sink(&self) -> bool {
        self.recomb_rate > 0.0 || self.trap_rates.iter().any(|&k| k > 0.0)
    }

    /// Tight-binding part in ps⁻¹ (ħ = 1).
    pub fn hamiltonian(&self) -> CMatrix {
        let n = self.n_sites();
        let u = &self.units;
        CMatrix::from_fn(n, n, |r, c| {
            let v = if r == c { self.site_energies[r] } else { self.couplings[(r, c)] };
            Complex64::new(u.to_angular(v), 0.0)
        })
    }

    /// `H_S − iΓ Σ|m⟩⟨m| − i Σ κ_m |m⟩⟨m|` in ps⁻¹.
    pub fn effective_hamiltonian(&self) -> CMatrix {
        let mut h = self.hamiltonian();
        for m in 0..self.n_sites() {
            h[(m, m)] -= Complex64::new(0.0, self.recomb_rate + self.trap_rates[m]);
        }
        h
    }
}

/// Density matrix of the single-excitation manifold.
///
/// The trace is allowed to fall below one: population leaves through traps
/// and recombination.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-9;

    /// Validates Hermiticity, trace and diagonal sign at the default
    /// tolerances.
    pub fn new(data: CMatrix) -> Result<Self> {
        Self::with_tolerance(data, Self::HERMITIAN_TOL)
    }

    /// Like [`DensityMatrix::new`] with `tol` replacing the Hermiticity and
    /// diagonal tolerances; used for integrator output, where the bound
    /// scales with the accumulated local error.
    pub fn with_tolerance(data: CMatrix, tol: f64) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::Config(format!(
                "density matrix must be square and non-empty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let defect = hermitian_defect(&data);
        if !(defect <= tol) {
            return Err(Error::NumericalConsistency(format!(
                "density matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let tr = data.trace().re;
        if !(tr >= -tol && tr <= 1.0 + Self::TRACE_TOL.max(tol)) {
            return Err(Error::NumericalConsistency(format!("trace {tr} outside [0, 1]")));
        }
        for m in 0..data.nrows() {
            let d = data[(m, m)];
            if d.re < -tol || d.im.abs() > tol {
                return Err(Error::NumericalConsistency(format!(
                    "diagonal entry {} = {d} is not a non-negative real",
                    m + 1
                )));
            }
        }
        Ok(Self(data))
    }

    pub(crate) fn from_raw(data: CMatrix) -> Self {
        Self(data)
    }

    pub fn n_sites(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.n_sites()).map(|m| self.0[(m, m)].re).collect()
    }

    /// `Σ_{m≠n} |ρ_mn|`.
    pub fn coherence_l1(&self) -> f64 {
        let n = self.n_sites();
        let mut s = 0.0;
        for c in 0..n {
            for r in 0..n {
                if r != c {
                    s += self.0[(r, c)].norm();
                }
            }
        }
        s
    }
}

/// How the excitation starts out. Site labels are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "sites", rename_all = "lowercase"))]
pub enum InitialState {
    Site(usize),
    /// `(1/|S|) Σ_{m∈S} |m⟩⟨m|`.
    Mixture(Vec<usize>),
    /// `|ψ⟩⟨ψ|` with `|ψ⟩ = |S|^{-1/2} Σ_{m∈S} |m⟩`.
    Superposition(Vec<usize>),
}

impl InitialState {
    pub fn sites(&self) -> Vec<usize> {
        match self {
            InitialState::Site(m) => alloc::vec![*m],
            InitialState::Mixture(s) | InitialState::Superposition(s) => s.clone(),
        }
    }

    pub fn density_matrix(&self, n_sites: usize) -> Result<DensityMatrix> {
        let sites = self.sites();
        if sites.is_empty() {
            return Err(Error::Config("initial state has an empty site set".into()));
        }
        for (i, &m) in sites.iter().enumerate() {
            if m == 0 || m > n_sites {
                return Err(Error::Config(format!(
                    "initial site {m} outside 1..={n_sites}"
                )));
            }
            if sites[..i].contains(&m) {
                return Err(Error::Config(format!("initial site {m} listed twice")));
            }
        }
        let mut rho = CMatrix::from_element(n_sites, n_sites, ZERO);
        let w = Complex64::new(1.0 / sites.len() as f64, 0.0);
        match self {
            InitialState::Site(_) | InitialState::Mixture(_) => {
                for &m in &sites {
                    rho[(m - 1, m - 1)] = w;
                }
            }
            InitialState::Superposition(_) => {
                for &a in &sites {
                    for &b in &sites {
                        rho[(a - 1, b - 1)] = w;
                    }
                }
            }
        }
        Ok(DensityMatrix(rho))
    }
}
