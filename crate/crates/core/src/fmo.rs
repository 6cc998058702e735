// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! The seven-site Fenna–Matthews–Olson complex.
//!
//! The Hamiltonian ships as a plain-text data file next to a SHA-256
//! sidecar. The excitation enters at sites 1 and 6 and leaves to the
//! reaction center through site 3.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, InitialState, TransportSystem};
use crate::scan::DephasingScan;
use crate::search::log_grid;
use crate::observables::TransportResult;

pub const N_SITES: usize = 7;

/// Bundled Hamiltonian, cm⁻¹.
pub const BUNDLED_DATA: &str = include_str!("../data/fmo_cho2005.txt");

/// Contents of the bundled checksum sidecar (`<hex>  <file name>`).
pub const BUNDLED_SHA256: &str = include_str!("../data/fmo_cho2005.txt.sha256");

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// First whitespace-separated token of a checksum sidecar.
pub fn sidecar_digest(sidecar: &str) -> Result<String> {
    sidecar
        .split_whitespace()
        .next()
        .filter(|t| t.len() == 64 && t.bytes().all(|c| c.is_ascii_hexdigit()))
        .map(|t| t.to_ascii_lowercase())
        .ok_or_else(|| Error::Parse { line: 1, message: "checksum sidecar holds no SHA-256 digest".into() })
}

pub fn verify_checksum(bytes: &[u8], expected: &str) -> Result<()> {
    let found = sha256_hex(bytes);
    if found != expected.to_ascii_lowercase() {
        return Err(Error::DataIntegrity { expected: expected.into(), found });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FmoHamiltonian {
    pub site_energies: [f64; N_SITES],
    /// Symmetric, zero diagonal.
    pub couplings: [[f64; N_SITES]; N_SITES],
}

impl FmoHamiltonian {
    /// Parses the data-file format: `#` comments, a `unit cm-1` line, then
    /// 7 energies and 21 upper-triangle couplings, whitespace separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut unit_seen = false;
        let mut values: Vec<f64> = Vec::with_capacity(28);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            if !unit_seen {
                let mut it = line.split_whitespace();
                match (it.next(), it.next(), it.next()) {
                    (Some("unit"), Some("cm-1"), None) => {
                        unit_seen = true;
                        continue;
                    }
                    _ => {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("expected `unit cm-1`, found `{line}`"),
                        })
                    }
                }
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("`{tok}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse { line: lineno, message: format!("`{tok}` is not finite") });
                }
                if values.len() == 28 {
                    return Err(Error::Parse { line: lineno, message: "more than 28 values".into() });
                }
                values.push(v);
            }
        }
        if !unit_seen {
            return Err(Error::Parse { line: 0, message: "missing `unit cm-1` line".into() });
        }
        if values.len() != 28 {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected 7 energies and 21 couplings, found {} values", values.len()),
            });
        }
        let mut site_energies = [0.0; N_SITES];
        site_energies.copy_from_slice(&values[..N_SITES]);
        let mut couplings = [[0.0; N_SITES]; N_SITES];
        let mut k = N_SITES;
        for r in 0..N_SITES {
            for c in (r + 1)..N_SITES {
                couplings[r][c] = values[k];
                couplings[c][r] = values[k];
                k += 1;
            }
        }
        Ok(Self { site_energies, couplings })
    }

    /// Checks `text` against `expected_sha256` and parses it.
    pub fn load_verified(text: &str, expected_sha256: &str) -> Result<Self> {
        verify_checksum(text.as_bytes(), expected_sha256)?;
        Self::parse(text)
    }

    pub fn bundled() -> Result<Self> {
        Self::load_verified(BUNDLED_DATA, &sidecar_digest(BUNDLED_SHA256)?)
    }

    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation of a site energy from the mean site energy.
    pub fn energy_spread(&self) -> f64 {
        let mean = self.site_energies.iter().sum::<f64>() / N_SITES as f64;
        self.site_energies.iter().fold(0.0, |m, e| m.max((e - mean).abs()))
    }
}

/// Replacement values for an [`FmoModel`]; `None` keeps the default.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FmoOverrides {
    /// κ₃, ps⁻¹.
    pub trap_rate: Option<f64>,
    /// Γ, ps⁻¹.
    pub recomb_rate: Option<f64>,
    /// γ_φ, ps⁻¹.
    pub dephasing_rate: Option<f64>,
    pub initial_state: Option<InitialState>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FmoModel {
    pub hamiltonian: FmoHamiltonian,
    /// 1-based.
    pub trap_site: usize,
    /// κ₃, ps⁻¹.
    pub trap_rate: f64,
    /// Γ, ps⁻¹. The 1 ns exciton lifetime read as a population lifetime,
    /// `e^{−2Γt}`, gives 0.5 ns⁻¹.
    pub recomb_rate: f64,
    pub dephasing_rate: f64,
    pub initial_state: InitialState,
}

pub const DEFAULT_TRAP_SITE: usize = 3;
pub const DEFAULT_TRAP_RATE: f64 = 1.0;
pub const DEFAULT_RECOMB_RATE: f64 = 0.0005;

impl FmoModel {
    pub fn new(hamiltonian: FmoHamiltonian) -> Self {
        Self {
            hamiltonian,
            trap_site: DEFAULT_TRAP_SITE,
            trap_rate: DEFAULT_TRAP_RATE,
            recomb_rate: DEFAULT_RECOMB_RATE,
            dephasing_rate: 0.0,
            initial_state: InitialState::Mixture(alloc::vec![1, 6]),
        }
    }

    /// Default model on the bundled Hamiltonian.
    pub fn bundled() -> Result<Self> {
        Ok(Self::new(FmoHamiltonian::bundled()?))
    }

    pub fn with_overrides(mut self, o: &FmoOverrides) -> Result<Self> {
        if let Some(k) = o.trap_rate {
            self.trap_rate = k;
        }
        if let Some(g) = o.recomb_rate {
            self.recomb_rate = g;
        }
        if let Some(g) = o.dephasing_rate {
            self.dephasing_rate = g;
        }
        if let Some(s) = &o.initial_state {
            self.initial_state = s.clone();
        }
        self.transport_system()?;
        self.initial_density()?;
        Ok(self)
    }

    pub fn transport_system(&self) -> Result<TransportSystem> {
        if !(1..=N_SITES).contains(&self.trap_site) {
            return Err(Error::Config(format!("trap site {} outside 1..=7", self.trap_site)));
        }
        let mut traps = alloc::vec![0.0; N_SITES];
        traps[self.trap_site - 1] = self.trap_rate;
        TransportSystem::new(
            self.hamiltonian.site_energies.to_vec(),
            self.hamiltonian.couplings.iter().map(|r| r.to_vec()).collect(),
            traps,
            self.recomb_rate,
            self.dephasing_rate,
        )
    }

    pub fn initial_density(&self) -> Result<DensityMatrix> {
        self.initial_state.density_matrix(N_SITES)
    }

    pub fn scan(&self) -> Result<DephasingScan> {
        DephasingScan::new(&self.transport_system()?, &self.initial_density()?)
    }
}

/// 60 logarithmic points over `[1e-3, 1e5]` ps⁻¹.
pub fn default_gamma_grid() -> Vec<f64> {
    log_grid(1e-3, 1e5, 60)
}

/// 41 logarithmic points over `[1e-2, 1e2]` ps⁻¹.
pub fn default_kappa_grid() -> Vec<f64> {
    log_grid(1e-2, 1e2, 41)
}

fn check_grid(name: &str, grid: &[f64], strictly_positive: bool) -> Result<()> {
    for &g in grid {
        let ok = g.is_finite() && if strictly_positive { g > 0.0 } else { g >= 0.0 };
        if !ok {
            return Err(Error::Config(format!("{name} grid value {g} is not allowed")));
        }
    }
    Ok(())
}

/// One result per grid point, in grid order.
pub fn dephasing_sweep(model: &FmoModel, gamma_grid: &[f64]) -> Result<Vec<(f64, TransportResult)>> {
    check_grid("dephasing", gamma_grid, false)?;
    let scan = model.scan()?;
    gamma_grid.iter().map(|&g| Ok((g, scan.evaluate(g)?))).collect()
}

/// Transfer times τ(γ_φ, κ₃).
#[derive(Debug, Clone, PartialEq)]
pub struct TransferTimeSurface {
    pub gammas: Vec<f64>,
    pub kappas: Vec<f64>,
    /// `tau[i][j]` at `kappas[i]`, `gammas[j]`; `None` where τ is undefined.
    pub tau: Vec<Vec<Option<f64>>>,
}

impl TransferTimeSurface {
    /// Grid position `(kappa index, gamma index)` of the smallest τ.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in self.tau.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(v) = *v {
                    if best.map_or(true, |b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// True when the global minimum is away from every grid edge.
    pub fn has_interior_minimum(&self) -> bool {
        match self.argmin() {
            Some((i, j)) => i > 0 && j > 0 && i + 1 < self.kappas.len() && j + 1 < self.gammas.len(),
            None => false,
        }
    }
}

/// Transfer time for one trap rate across `gamma_grid`.
pub fn transfer_time_row(model: &FmoModel, kappa: f64, gamma_grid: &[f64]) -> Result<Vec<Option<f64>>> {
    let mut m = model.clone();
    m.trap_rate = kappa;
    let scan = m.scan()?;
    gamma_grid.iter().map(|&g| Ok(scan.evaluate(g)?.transfer_time)).collect()
}

pub fn trap_dephasing_surface(
    model: &FmoModel,
    gamma_grid: &[f64],
    kappa_grid: &[f64],
) -> Result<TransferTimeSurface> {
    check_grid("dephasing", gamma_grid, true)?;
    check_grid("trap rate", kappa_grid, true)?;
    let tau = kappa_grid
        .iter()
        .map(|&k| transfer_time_row(model, k, gamma_grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransferTimeSurface { gammas: gamma_grid.to_vec(), kappas: kappa_grid.to_vec(), tau })
}
