// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code, clippy::needless_range_loop)]

use enaqt_core::rng::CounterRng;
use enaqt_core::{propagate_observed, CMatrix, DensityMatrix, PropagateOptions, TransportSystem};
use num_complex::Complex64;

pub fn uniform_in(rng: &mut CounterRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

/// Random connected system: energies and couplings in `[-scale, scale]`
/// cm⁻¹, a trap on the last site, recombination in `[0.2, 1]` ps⁻¹.
pub fn random_system(rng: &mut CounterRng, n: usize, scale: f64, dephasing: f64) -> TransportSystem {
    let energies: Vec<f64> = (0..n).map(|_| uniform_in(rng, -scale, scale)).collect();
    let mut v = vec![vec![0.0; n]; n];
    for r in 0..n {
        for c in (r + 1)..n {
            let x = uniform_in(rng, -scale, scale);
            v[r][c] = x;
            v[c][r] = x;
        }
    }
    let mut traps = vec![0.0; n];
    traps[n - 1] = uniform_in(rng, 0.5, 2.0);
    let recomb = uniform_in(rng, 0.2, 1.0);
    TransportSystem::new(energies, v, traps, recomb, dephasing).unwrap()
}

/// Random density matrix `A A† / tr(A A†)` with Gaussian A.
pub fn random_density(rng: &mut CounterRng, n: usize) -> DensityMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.standard_normal(), rng.standard_normal()));
    let mut rho = &a * a.adjoint();
    let tr = rho.trace();
    rho /= tr;
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(rho).unwrap()
}

/// Random Hermitian matrix with Gaussian entries (not a state).
pub fn random_hermitian(rng: &mut CounterRng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.standard_normal(), rng.standard_normal()));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

pub struct Quadrature {
    /// `∫ρ_mm dt`.
    pub first: Vec<f64>,
    /// `∫t ρ_mm dt`.
    pub second: Vec<f64>,
    pub final_trace: f64,
}

/// Composite Simpson rule over the accepted RK4 steps, using the midpoint
/// state each step already computes.
pub fn simpson(sys: &TransportSystem, rho0: &DensityMatrix, horizon: f64, tolerance: f64) -> Quadrature {
    let n = sys.n_sites();
    let mut first = vec![0.0; n];
    let mut second = vec![0.0; n];
    let opts = PropagateOptions { tolerance, sample_count: 2, ..Default::default() };
    let traj = propagate_observed(sys, rho0, horizon, &opts, |s| {
        let (t0, tm, t1) = (s.t, s.t + 0.5 * s.h, s.t + s.h);
        for m in 0..n {
            let (a, b, c) = (s.start[(m, m)].re, s.mid[(m, m)].re, s.end[(m, m)].re);
            first[m] += s.h / 6.0 * (a + 4.0 * b + c);
            second[m] += s.h / 6.0 * (t0 * a + 4.0 * tm * b + t1 * c);
        }
    })
    .unwrap();
    Quadrature { first, second, final_trace: traj.states.last().unwrap().trace() }
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / y.abs().max(1e-300)).fold(0.0, f64::max)
}
