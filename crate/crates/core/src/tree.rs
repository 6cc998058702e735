// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Disordered binary trees and the search for the most efficient dephasing
//! rate.
//!
//! A generation-g tree has `2^g − 1` sites. Site m couples to 2m and 2m+1
//! with strength V; the trap sits on the root (site 1) and the excitation
//! starts on the `2^(g−1)` leaves. Site energies are drawn from
//! `N(ε₀, δ²)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, InitialState, TransportSystem};
use crate::rng::{derive_seed, CounterRng};
use crate::scan::DephasingScan;
use crate::search::{golden_section_maximize, log_grid};
use crate::units::UnitConvention;

/// Largest generation accepted without `allow_large`.
pub const MAX_GENERATION: u32 = 7;

/// Key of one disorder realisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeSeed {
    pub master: u64,
    pub delta_index: u64,
    pub sample_index: u64,
}

impl TreeSeed {
    pub fn key(&self) -> u64 {
        derive_seed(self.master, &[self.delta_index, self.sample_index])
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeSpec {
    pub generation: u32,
    /// V, cm⁻¹.
    pub coupling: f64,
    /// ε₀, cm⁻¹.
    pub mean_energy: f64,
    /// δ, standard deviation of the site energies, cm⁻¹.
    pub disorder: f64,
    /// κ at the root, ps⁻¹.
    pub trap_rate: f64,
    /// Γ, ps⁻¹.
    pub recomb_rate: f64,
    pub seed: TreeSeed,
    /// Lift the [`MAX_GENERATION`] guard.
    pub allow_large: bool,
    pub units: UnitConvention,
}

/// Trap rate in units of V.
pub const DEFAULT_TRAP_OVER_V: f64 = 2.0;
/// Recombination rate in units of V.
pub const DEFAULT_RECOMB_OVER_V: f64 = 0.005;

impl TreeSpec {
    /// Ordered tree with ε₀ = 0, κ = 2V and Γ = 0.005V.
    pub fn new(generation: u32, coupling: f64) -> Self {
        let units = UnitConvention::default();
        let v = units.to_angular(coupling.abs());
        Self {
            generation,
            coupling,
            mean_energy: 0.0,
            disorder: 0.0,
            trap_rate: DEFAULT_TRAP_OVER_V * v,
            recomb_rate: DEFAULT_RECOMB_OVER_V * v,
            seed: TreeSeed::default(),
            allow_large: false,
            units,
        }
    }

    pub fn with_disorder(mut self, disorder: f64) -> Self {
        self.disorder = disorder;
        self
    }

    pub fn with_seed(mut self, seed: TreeSeed) -> Self {
        self.seed = seed;
        self
    }

    /// |V| as an angular frequency, ps⁻¹.
    pub fn coupling_angular(&self) -> f64 {
        self.units.to_angular(self.coupling.abs())
    }

    pub fn n_sites(&self) -> usize {
        (1usize << self.generation) - 1
    }

    /// 1-based labels of the outermost generation.
    pub fn leaves(&self) -> Vec<usize> {
        ((1usize << (self.generation - 1))..(1usize << self.generation)).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.generation < 2 {
            return Err(Error::Config(format!("tree generation must be >= 2, got {}", self.generation)));
        }
        if self.generation > MAX_GENERATION && !self.allow_large {
            return Err(Error::SizeGuard { generation: self.generation, max: MAX_GENERATION });
        }
        if self.generation >= usize::BITS {
            return Err(Error::Config(format!("tree generation {} is too large", self.generation)));
        }
        if !(self.disorder >= 0.0 && self.disorder.is_finite()) {
            return Err(Error::Config(format!("disorder must be finite and >= 0, got {}", self.disorder)));
        }
        if !self.coupling.is_finite() || !self.mean_energy.is_finite() {
            return Err(Error::Config("coupling and mean energy must be finite".into()));
        }
        Ok(())
    }

    /// Site energies of this realisation, cm⁻¹.
    pub fn site_energies(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = CounterRng::new(self.seed.key());
        Ok((0..self.n_sites()).map(|_| rng.normal(self.mean_energy, self.disorder)).collect())
    }
}

pub fn generate_tree(spec: &TreeSpec) -> Result<TransportSystem> {
    let energies = spec.site_energies()?;
    let n = energies.len();
    let mut couplings = nalgebra::DMatrix::zeros(n, n);
    for parent in 1..=(n / 2) {
        for child in [2 * parent, 2 * parent + 1] {
            couplings[(parent - 1, child - 1)] = spec.coupling;
            couplings[(child - 1, parent - 1)] = spec.coupling;
        }
    }
    let mut traps = alloc::vec![0.0; n];
    traps[0] = spec.trap_rate;
    Ok(TransportSystem::from_matrix(energies, couplings, traps, spec.recomb_rate, 0.0)?
        .with_units(spec.units))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum InitialKind {
    Coherent,
    Mixture,
}

impl InitialKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InitialKind::Coherent => "coherent",
            InitialKind::Mixture => "mixture",
        }
    }
}

pub fn leaf_initial_state(spec: &TreeSpec, kind: InitialKind) -> InitialState {
    match kind {
        InitialKind::Coherent => InitialState::Superposition(spec.leaves()),
        InitialKind::Mixture => InitialState::Mixture(spec.leaves()),
    }
}

/// Grid-then-golden-section search settings. Rates in ps⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
    /// Relative tolerance on γ_φ for the refinement.
    pub rel_tol: f64,
}

impl SearchConfig {
    /// 40 points over `[1e-3·scale, 1e3·scale]`.
    pub fn scaled(scale: f64) -> Self {
        Self { points: 40, lo: 1e-3 * scale, hi: 1e3 * scale, rel_tol: 1e-3 }
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 || !(self.lo > 0.0) || !(self.hi > self.lo) || !self.hi.is_finite() {
            return Err(Error::Config(format!("invalid search range {self:?}")));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Config("search tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimalDephasing {
    /// γ_φ*, ps⁻¹.
    pub gamma: f64,
    /// η(γ_φ*).
    pub efficiency: f64,
    /// η(0).
    pub efficiency_at_zero: f64,
}

/// Maximises η over γ_φ ≥ 0 for the given system and initial state.
///
/// Grid points that fail to solve are skipped; the refinement runs in
/// log γ_φ on the cells around the grid winner and is discarded if it does
/// not improve on it.
pub fn optimal_dephasing(
    sys: &TransportSystem,
    rho0: &DensityMatrix,
    cfg: &SearchConfig,
) -> Result<OptimalDephasing> {
    cfg.validate()?;
    let scan = DephasingScan::new(sys, rho0)?;
    let at_zero = scan.efficiency(0.0)?;
    let grid = log_grid(cfg.lo, cfg.hi, cfg.points);
    let values: Vec<Option<f64>> = grid
        .iter()
        .map(|&g| match scan.efficiency(g) {
            Ok(v) => Some(v),
            Err(e) => {
                log::debug!("η(γ_φ = {g}) failed: {e}");
                None
            }
        })
        .collect();
    let Some((imax, vmax)) = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
    else {
        return Err(Error::Optimization("every grid point failed to solve".into()));
    };

    let mut best = OptimalDephasing { gamma: grid[imax], efficiency: vmax, efficiency_at_zero: at_zero };
    let lo = libm::log(grid[imax.saturating_sub(1)]);
    let hi = libm::log(grid[(imax + 1).min(grid.len() - 1)]);
    let (x, v) = golden_section_maximize::<_, Error>(
        |x| Ok(scan.efficiency(libm::exp(x)).unwrap_or(f64::NEG_INFINITY)),
        lo,
        hi,
        libm::log1p(cfg.rel_tol),
    )?;
    if v > best.efficiency {
        best.gamma = libm::exp(x);
        best.efficiency = v;
    }
    if at_zero >= best.efficiency {
        best.gamma = 0.0;
        best.efficiency = at_zero;
    }
    Ok(best)
}

/// Builds the realisation described by `spec` and optimises it.
pub fn optimize_sample(spec: &TreeSpec, kind: InitialKind, cfg: &SearchConfig) -> Result<OptimalDephasing> {
    let sys = generate_tree(spec)?;
    let rho0 = leaf_initial_state(spec, kind).density_matrix(sys.n_sites())?;
    optimal_dephasing(&sys, &rho0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_four_topology() {
        let spec = TreeSpec::new(4, 100.0);
        let sys = generate_tree(&spec).unwrap();
        assert_eq!(sys.n_sites(), 15);
        let v = sys.couplings();
        let mut bonds = 0;
        for r in 0..15 {
            for c in (r + 1)..15 {
                if v[(r, c)] != 0.0 {
                    assert_eq!(v[(r, c)], 100.0);
                    assert!(c + 1 == 2 * (r + 1) || c + 1 == 2 * (r + 1) + 1);
                    bonds += 1;
                }
            }
        }
        assert_eq!(bonds, 14);
        assert!(sys.site_energies().iter().all(|&e| e == 0.0));
        assert_eq!(spec.leaves(), (8..=15).collect::<Vec<_>>());
        let traps = sys.trap_rates();
        assert_eq!(traps[0], 2.0 * spec.coupling_angular());
        assert!(traps[1..].iter().all(|&k| k == 0.0));
        assert_eq!(sys.recomb_rate(), 0.005 * spec.coupling_angular());
    }

    #[test]
    fn energies_are_deterministic() {
        let seed = TreeSeed { master: 7, delta_index: 3, sample_index: 11 };
        let spec = TreeSpec::new(4, 1.0).with_disorder(2.0).with_seed(seed);
        let a = spec.site_energies().unwrap();
        let b = spec.site_energies().unwrap();
        assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        let other = spec.clone().with_seed(TreeSeed { sample_index: 12, ..seed });
        assert_ne!(a, other.site_energies().unwrap());
    }

    #[test]
    fn size_guard() {
        assert!(matches!(generate_tree(&TreeSpec::new(1, 1.0)), Err(Error::Config(_))));
        assert!(matches!(
            generate_tree(&TreeSpec::new(8, 1.0)),
            Err(Error::SizeGuard { generation: 8, max: 7 })
        ));
        let mut big = TreeSpec::new(8, 1.0);
        big.allow_large = true;
        assert_eq!(big.site_energies().unwrap().len(), 255);
        assert!(generate_tree(&TreeSpec::new(3, 1.0).with_disorder(-1.0)).is_err());
    }

    #[test]
    fn leaf_states() {
        let spec = TreeSpec::new(4, 1.0);
        let c = leaf_initial_state(&spec, InitialKind::Coherent).density_matrix(15).unwrap();
        let m = leaf_initial_state(&spec, InitialKind::Mixture).density_matrix(15).unwrap();
        for a in 0..15 {
            for b in 0..15 {
                let leaf = |x: usize| x >= 7;
                let expect_c = if leaf(a) && leaf(b) { 0.125 } else { 0.0 };
                let expect_m = if a == b && leaf(a) { 0.125 } else { 0.0 };
                assert!((c.as_matrix()[(a, b)].re - expect_c).abs() < 1e-15);
                assert!((m.as_matrix()[(a, b)].re - expect_m).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn optimum_dominates_zero_endpoint() {
        let spec = TreeSpec::new(3, 1.0);
        let cfg = SearchConfig::scaled(spec.coupling_angular());
        for kind in [InitialKind::Coherent, InitialKind::Mixture] {
            let r = optimize_sample(&spec, kind, &cfg).unwrap();
            assert!(r.efficiency >= r.efficiency_at_zero - 1e-10);
        }
    }
}
