// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! FMO model loading with checksum verification, and the parallel versions
//! of the dephasing sweep and the trap/dephasing surface.

use std::path::{Path, PathBuf};

use enaqt_core::fmo::{
    sidecar_digest, transfer_time_row, FmoHamiltonian, FmoModel, FmoOverrides, TransferTimeSurface,
    BUNDLED_DATA, BUNDLED_SHA256,
};

use crate::error::{Error, Result};
use crate::io::{read_text, SweepRow};
use crate::sweep::{run_all, SweepPlan};

#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: FmoModel,
    /// Where the Hamiltonian came from (`bundled` or a path).
    pub source: String,
    pub sha256: String,
}

/// Sidecar location for a data file: the same path with `.sha256` appended.
pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut p = data.as_os_str().to_owned();
    p.push(".sha256");
    PathBuf::from(p)
}

/// Loads the bundled Hamiltonian, or `data_path` checked against its
/// sidecar, and applies `overrides`.
pub fn load_fmo_model(data_path: Option<&Path>, overrides: &FmoOverrides) -> Result<LoadedModel> {
    let (text, sidecar, source) = match data_path {
        None => (BUNDLED_DATA.to_string(), BUNDLED_SHA256.to_string(), "bundled".to_string()),
        Some(p) => {
            let text = read_text(p)?;
            let sidecar = read_text(&sidecar_path(p))?;
            (text, sidecar, p.display().to_string())
        }
    };
    let sha256 = sidecar_digest(&sidecar)?;
    let hamiltonian = FmoHamiltonian::load_verified(&text, &sha256)?;
    let model = FmoModel::new(hamiltonian).with_overrides(overrides)?;
    Ok(LoadedModel { model, source, sha256 })
}

fn check_grid(name: &str, grid: &[f64], positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{name} grid is empty")));
    }
    for &g in grid {
        if !(g.is_finite() && if positive { g > 0.0 } else { g >= 0.0 }) {
            return Err(Error::Config(format!("{name} grid value {g} is not allowed")));
        }
    }
    Ok(())
}

/// One row per γ_φ, in grid order, evaluated on `width` threads.
pub fn dephasing_sweep(model: &FmoModel, gamma_grid: &[f64], width: usize) -> Result<Vec<SweepRow>> {
    check_grid("dephasing", gamma_grid, false)?;
    let scan = model.scan()?;
    let plan = SweepPlan::new(gamma_grid.to_vec()).with_width(width);
    run_all(&plan, |_, &gamma| scan.evaluate(gamma).map(|result| SweepRow { gamma, result }))
}

/// τ(γ_φ, κ₃), one task per trap rate.
pub fn trap_dephasing_surface(
    model: &FmoModel,
    gamma_grid: &[f64],
    kappa_grid: &[f64],
    width: usize,
) -> Result<TransferTimeSurface> {
    check_grid("dephasing", gamma_grid, true)?;
    check_grid("trap rate", kappa_grid, true)?;
    let plan = SweepPlan::new(kappa_grid.to_vec()).with_width(width);
    let tau = run_all(&plan, |_, &kappa| transfer_time_row(model, kappa, gamma_grid))?;
    Ok(TransferTimeSurface { gammas: gamma_grid.to_vec(), kappas: kappa_grid.to_vec(), tau })
}
