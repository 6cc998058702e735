// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Disorder ensembles of binary trees: for every disorder strength and
//! sample, η without dephasing and at the optimal dephasing rate.

use enaqt_core::search::linear_grid;
use enaqt_core::stats::{mean, sample_std};
use enaqt_core::tree::{
    generate_tree, leaf_initial_state, optimal_dephasing, InitialKind, OptimalDephasing, SearchConfig, TreeSeed,
    TreeSpec,
};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sweep::{run_sweep, SweepPlan};

/// Largest tolerated fraction of failed samples per disorder strength.
pub const MAX_FAILURE_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub generation: u32,
    /// V, cm⁻¹.
    pub coupling: f64,
    /// δ/V values.
    pub delta_grid: Vec<f64>,
    pub samples: usize,
    pub master_seed: u64,
    pub search_points: usize,
    pub search_rel_tol: f64,
    pub allow_large: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            generation: 4,
            coupling: 100.0,
            delta_grid: default_delta_grid(),
            samples: 100,
            master_seed: 0,
            search_points: 40,
            search_rel_tol: 1e-3,
            allow_large: false,
        }
    }
}

/// 20 points, δ/V from 0 to 4.
pub fn default_delta_grid() -> Vec<f64> {
    linear_grid(0.0, 4.0, 20)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRecord {
    pub delta_over_v: f64,
    pub n_samples: usize,
    pub n_ok: usize,
    pub eta_quantum_mean: f64,
    pub eta_quantum_std: f64,
    pub eta_opt_mean: f64,
    pub eta_opt_std: f64,
    /// ps⁻¹.
    pub gamma_opt_mean: f64,
    pub gamma_opt_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderEnsembleReport {
    pub kind: InitialKind,
    pub master_seed: u64,
    pub records: Vec<DeltaRecord>,
    /// Per-sample outcomes, `samples[δ index][sample index]`.
    #[serde(skip)]
    pub samples: Vec<Vec<Option<OptimalDephasing>>>,
}

impl EnsembleConfig {
    pub fn spec(&self, delta_index: usize, sample_index: usize) -> TreeSpec {
        let mut spec = TreeSpec::new(self.generation, self.coupling)
            .with_disorder(self.delta_grid[delta_index] * self.coupling.abs())
            .with_seed(TreeSeed {
                master: self.master_seed,
                delta_index: delta_index as u64,
                sample_index: sample_index as u64,
            });
        spec.allow_large = self.allow_large;
        spec
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("at least one sample per disorder strength is needed".into()));
        }
        if self.delta_grid.is_empty() || self.delta_grid.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::Config("disorder grid must be non-empty, finite and >= 0".into()));
        }
        if !(self.coupling.is_finite() && self.coupling != 0.0) {
            return Err(Error::Config("tree coupling must be finite and non-zero".into()));
        }
        Ok(())
    }
}

fn reduce(delta_over_v: f64, outcomes: &[Option<OptimalDephasing>]) -> DeltaRecord {
    let ok: Vec<&OptimalDephasing> = outcomes.iter().flatten().collect();
    let column = |f: fn(&OptimalDephasing) -> f64| ok.iter().map(|o| f(o)).collect::<Vec<f64>>();
    let q = column(|o| o.efficiency_at_zero);
    let e = column(|o| o.efficiency);
    let g = column(|o| o.gamma);
    DeltaRecord {
        delta_over_v,
        n_samples: outcomes.len(),
        n_ok: ok.len(),
        eta_quantum_mean: mean(&q),
        eta_quantum_std: sample_std(&q),
        eta_opt_mean: mean(&e),
        eta_opt_std: sample_std(&e),
        gamma_opt_mean: mean(&g),
        gamma_opt_std: sample_std(&g),
    }
}

/// Runs the ensemble once per realisation and evaluates every requested
/// initial-state kind on the same trees. Returns one report per kind.
pub fn disorder_ensemble(
    cfg: &EnsembleConfig,
    kinds: &[InitialKind],
    width: usize,
) -> Result<Vec<DisorderEnsembleReport>> {
    cfg.validate()?;
    if kinds.is_empty() {
        return Err(Error::Config("no initial-state kind requested".into()));
    }
    let search = {
        let mut s = SearchConfig::scaled(TreeSpec::new(cfg.generation, cfg.coupling).coupling_angular());
        s.points = cfg.search_points;
        s.rel_tol = cfg.search_rel_tol;
        s
    };
    let tasks: Vec<(usize, usize)> =
        (0..cfg.delta_grid.len()).flat_map(|d| (0..cfg.samples).map(move |s| (d, s))).collect();
    // Per-δ limits are enforced below; the engine only collects.
    let plan = SweepPlan::new(tasks).with_seed(cfg.master_seed).with_width(width).with_failure_tolerance(1.0);
    let results = run_sweep(&plan, |_, &(d, s)| -> enaqt_core::Result<Vec<OptimalDephasing>> {
        let spec = cfg.spec(d, s);
        let sys = generate_tree(&spec)?;
        kinds
            .iter()
            .map(|&k| {
                let rho0 = leaf_initial_state(&spec, k).density_matrix(sys.n_sites())?;
                optimal_dephasing(&sys, &rho0, &search)
            })
            .collect()
    })?;

    let mut by_delta: Vec<Vec<Option<Vec<OptimalDephasing>>>> = vec![Vec::with_capacity(cfg.samples); cfg.delta_grid.len()];
    for (i, r) in results.into_iter().enumerate() {
        let d = i / cfg.samples;
        match r {
            Ok(v) => by_delta[d].push(Some(v)),
            Err(e) => {
                log::warn!("δ/V = {}, sample {}: {e}", cfg.delta_grid[d], i % cfg.samples);
                by_delta[d].push(None);
            }
        }
    }
    for (d, outcomes) in by_delta.iter().enumerate() {
        let failed = outcomes.iter().filter(|o| o.is_none()).count();
        if failed as f64 > MAX_FAILURE_FRACTION * cfg.samples as f64 {
            return Err(Error::TooManyFailures {
                failed,
                total: cfg.samples,
                allowed: MAX_FAILURE_FRACTION,
                first: format!("at δ/V = {}", cfg.delta_grid[d]),
            });
        }
    }

    Ok(kinds
        .iter()
        .enumerate()
        .map(|(ki, &kind)| {
            let samples: Vec<Vec<Option<OptimalDephasing>>> = by_delta
                .iter()
                .map(|row| row.iter().map(|o| o.as_ref().map(|v| v[ki])).collect())
                .collect();
            let records = cfg.delta_grid.iter().zip(&samples).map(|(&dv, s)| reduce(dv, s)).collect();
            DisorderEnsembleReport { kind, master_seed: cfg.master_seed, records, samples }
        })
        .collect())
}
