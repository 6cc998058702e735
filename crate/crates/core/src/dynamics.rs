// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Haken–Strobl master equation with non-Hermitian sinks.
//!
//! ```text
//! dρ/dt = −i(H_eff ρ − ρ H_eff†) + γ_φ Σ_m (A_m ρ A_m − ½{A_m, ρ}),   A_m = |m⟩⟨m|
//! ```
//!
//! The dephasing sum leaves populations alone and damps every coherence
//! `ρ_mn` (m ≠ n) at rate γ_φ. Two evaluation routes are provided: explicit
//! time stepping ([`propagate`]) and the Liouvillian superoperator, whose
//! inverse gives the infinite-horizon integrals `∫ρ dt` and `∫tρ dt`
//! directly ([`integrated_state`]).

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    column_stack, hermitian_part, max_abs, unstack, CMatrix, CVector, DenseLu, I, ONE, ZERO,
};
use crate::model::{DensityMatrix, TransportSystem};

/// Condition number above which the Liouvillian is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Smallest step the integrator may take before reporting stiffness, in ps.
pub const MIN_STEP: f64 = 1e-9;

fn check_dimension(sys: &TransportSystem, rho: &CMatrix) -> Result<()> {
    let n = sys.n_sites();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::Config(format!(
            "density matrix is {}x{} but the system has {n} sites",
            rho.nrows(),
            rho.ncols()
        )));
    }
    Ok(())
}

/// Writes `dρ/dt` into `out`. `h_adj` must be `h†`.
fn rhs_into(h: &CMatrix, h_adj: &CMatrix, gamma: f64, rho: &CMatrix, out: &mut CMatrix) {
    let minus_i = Complex64::new(0.0, -1.0);
    out.gemm(minus_i, h, rho, ZERO);
    out.gemm(I, rho, h_adj, ONE);
    if gamma != 0.0 {
        let n = rho.nrows();
        for c in 0..n {
            for r in 0..n {
                if r != c {
                    out[(r, c)] -= rho[(r, c)] * gamma;
                }
            }
        }
    }
}

/// Right-hand side of the master equation in ps⁻¹.
pub fn master_equation_rhs(sys: &TransportSystem, rho: &DensityMatrix) -> Result<CMatrix> {
    rhs_matrix(sys, rho.as_matrix())
}

/// Same as [`master_equation_rhs`] for an arbitrary (not necessarily
/// physical) matrix; the map is linear.
pub fn rhs_matrix(sys: &TransportSystem, rho: &CMatrix) -> Result<CMatrix> {
    check_dimension(sys, rho)?;
    let h = sys.effective_hamiltonian();
    let h_adj = h.adjoint();
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    rhs_into(&h, &h_adj, sys.dephasing_rate(), rho, &mut out);
    Ok(out)
}

/// The master equation as an `N²×N²` matrix on column-stacked ρ
/// (`vec(ρ)[col·N + row] = ρ[row, col]`).
#[derive(Debug, Clone)]
pub struct Liouvillian {
    n: usize,
    matrix: CMatrix,
}

impl Liouvillian {
    pub fn build(sys: &TransportSystem) -> Self {
        let n = sys.n_sites();
        let h = sys.effective_hamiltonian();
        let gamma = sys.dephasing_rate();
        let dim = n * n;
        let mut l = CMatrix::zeros(dim, dim);
        // (Hρ)_{rc} = Σ_k H_{rk} ρ_{kc};  (ρH†)_{rc} = Σ_k ρ_{rk} conj(H_{ck})
        for c in 0..n {
            for r in 0..n {
                let row = c * n + r;
                for k in 0..n {
                    l[(row, c * n + k)] += -I * h[(r, k)];
                    l[(row, k * n + r)] += I * h[(c, k)].conj();
                }
                if r != c {
                    l[(row, row)] -= Complex64::new(gamma, 0.0);
                }
            }
        }
        Self { n, matrix: l }
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unstack(&(&self.matrix * column_stack(rho)), self.n)
    }

    /// Row functional `Σ_m vec-index(m,m)` composed with L; it vanishes
    /// identically when the dynamics is trace preserving.
    pub fn trace_functional(&self) -> CVector {
        let n = self.n;
        let dim = n * n;
        CVector::from_fn(dim, |j, _| {
            (0..n).map(|m| self.matrix[(m * n + m, j)]).fold(ZERO, |a, b| a + b)
        })
    }
}

/// `∫₀^∞ ρ(t) dt` (ps) and `∫₀^∞ t ρ(t) dt` (ps²).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedState {
    pub first: CMatrix,
    pub second: CMatrix,
}

impl IntegratedState {
    pub fn site_integrals(&self) -> Vec<f64> {
        (0..self.first.nrows()).map(|m| self.first[(m, m)].re).collect()
    }
}

/// Solves `L vec(S1) = −vec(ρ0)` and `L vec(S2) = −vec(S1)` with one dense
/// LU factorisation.
pub fn integrated_state(sys: &TransportSystem, rho0: &DensityMatrix) -> Result<IntegratedState> {
    check_dimension(sys, rho0.as_matrix())?;
    let n = sys.n_sites();
    let lu = DenseLu::new(Liouvillian::build(sys).into_matrix());
    let condition = if sys.has_sink() { lu.condition_estimate() } else { f64::INFINITY };
    if !(condition <= SINGULAR_CONDITION) {
        return Err(Error::NonConvergentIntegral { condition });
    }
    let singular = || Error::NonConvergentIntegral { condition: f64::INFINITY };
    let b = -column_stack(rho0.as_matrix());
    let s1 = lu.solve(&b).ok_or_else(singular)?;
    let s2 = lu.solve(&(-&s1)).ok_or_else(singular)?;
    Ok(IntegratedState {
        first: hermitian_part(&unstack(&s1, n)),
        second: hermitian_part(&unstack(&s2, n)),
    })
}

/// Integrator settings for [`propagate`].
#[derive(Debug, Clone, PartialEq)]
pub struct PropagateOptions {
    /// Local error tolerance per step, relative to the largest entry of ρ.
    pub tolerance: f64,
    /// First trial step; derived from the spectral scale when `None`.
    pub initial_step: Option<f64>,
    /// Upper bound on the step size.
    pub max_step: Option<f64>,
    /// Output times in ps. When empty, `sample_count` uniform samples over
    /// `[0, t_final]` are produced.
    pub sample_times: Vec<f64>,
    pub sample_count: usize,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            initial_step: None,
            max_step: None,
            sample_times: Vec::new(),
            sample_count: 101,
        }
    }
}

/// Sampled time evolution.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Sum of accepted local error estimates.
    pub error_bound: f64,
    pub steps: usize,
}

/// One accepted integrator step, handed to observers.
///
/// `start`, `mid` and `end` are the states at `t`, `t + h/2` and `t + h`.
pub struct Step<'a> {
    pub t: f64,
    pub h: f64,
    pub start: &'a CMatrix,
    pub mid: &'a CMatrix,
    pub end: &'a CMatrix,
}

struct Rk4 {
    h: CMatrix,
    h_adj: CMatrix,
    gamma: f64,
    k1: CMatrix,
    k2: CMatrix,
    k3: CMatrix,
    k4: CMatrix,
    tmp: CMatrix,
}

/// `y += a·x`.
fn add_scaled(y: &mut CMatrix, a: Complex64, x: &CMatrix) {
    y.zip_apply(x, |yi, xi| *yi += a * xi);
}

impl Rk4 {
    fn new(sys: &TransportSystem) -> Self {
        let h = sys.effective_hamiltonian();
        let n = h.nrows();
        let z = CMatrix::zeros(n, n);
        Self {
            h_adj: h.adjoint(),
            h,
            gamma: sys.dephasing_rate(),
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    /// Classic fourth-order step from `y` to `out`.
    fn step(&mut self, y: &CMatrix, dt: f64, out: &mut CMatrix) {
        let half = Complex64::new(0.5 * dt, 0.0);
        let full = Complex64::new(dt, 0.0);
        rhs_into(&self.h, &self.h_adj, self.gamma, y, &mut self.k1);
        self.tmp.copy_from(y);
        add_scaled(&mut self.tmp, half, &self.k1);
        rhs_into(&self.h, &self.h_adj, self.gamma, &self.tmp, &mut self.k2);
        self.tmp.copy_from(y);
        add_scaled(&mut self.tmp, half, &self.k2);
        rhs_into(&self.h, &self.h_adj, self.gamma, &self.tmp, &mut self.k3);
        self.tmp.copy_from(y);
        add_scaled(&mut self.tmp, full, &self.k3);
        rhs_into(&self.h, &self.h_adj, self.gamma, &self.tmp, &mut self.k4);
        out.copy_from(y);
        let sixth = Complex64::new(dt / 6.0, 0.0);
        let third = Complex64::new(dt / 3.0, 0.0);
        add_scaled(out, sixth, &self.k1);
        add_scaled(out, third, &self.k2);
        add_scaled(out, third, &self.k3);
        add_scaled(out, sixth, &self.k4);
    }

    /// Rough spectral radius bound of the generator, in ps⁻¹.
    fn rate_scale(&self) -> f64 {
        let n = self.h.nrows();
        let row_max = (0..n)
            .map(|r| (0..n).map(|c| self.h[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        2.0 * row_max + self.gamma
    }
}

fn sample_grid(t_final: f64, opts: &PropagateOptions) -> Result<Vec<f64>> {
    let mut times = if opts.sample_times.is_empty() {
        let k = opts.sample_count.max(2);
        (0..k)
            .map(|i| if i == k - 1 { t_final } else { t_final * i as f64 / (k - 1) as f64 })
            .collect::<Vec<_>>()
    } else {
        opts.sample_times.clone()
    };
    if times.iter().any(|t| !t.is_finite() || *t < 0.0 || *t > t_final) {
        return Err(Error::Config(format!("sample times must lie in [0, {t_final}]")));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("sample times must be strictly increasing".into()));
    }
    if times.first() != Some(&0.0) {
        times.insert(0, 0.0);
    }
    Ok(times)
}

/// Integrates the master equation with classic RK4 and step-doubling error
/// control, sampling ρ at the requested times.
pub fn propagate(
    sys: &TransportSystem,
    rho0: &DensityMatrix,
    t_final: f64,
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    propagate_observed(sys, rho0, t_final, opts, |_| {})
}

/// [`propagate`] with a callback on every accepted step.
pub fn propagate_observed<F>(
    sys: &TransportSystem,
    rho0: &DensityMatrix,
    t_final: f64,
    opts: &PropagateOptions,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(&Step<'_>),
{
    check_dimension(sys, rho0.as_matrix())?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::Config(format!("t_final must be positive, got {t_final}")));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::Config("integrator tolerance must be positive".into()));
    }
    let samples = sample_grid(t_final, opts)?;
    let n = sys.n_sites();
    let mut rk = Rk4::new(sys);
    let scale = rk.rate_scale().max(1e-12);
    let max_step = opts.max_step.unwrap_or(f64::INFINITY);
    let mut h = opts.initial_step.unwrap_or(0.1 / scale).min(max_step).min(t_final);

    let mut y = rho0.as_matrix().clone();
    let mut coarse = CMatrix::zeros(n, n);
    let mut mid = CMatrix::zeros(n, n);
    let mut fine = CMatrix::zeros(n, n);

    let mut times = Vec::with_capacity(samples.len());
    let mut states = Vec::with_capacity(samples.len());
    times.push(0.0);
    states.push(DensityMatrix::from_raw(y.clone()));

    let mut t = 0.0;
    let mut error_bound = 0.0;
    let mut steps = 0usize;
    for &target in &samples[1..] {
        while t < target {
            let remaining = target - t;
            let landing = h >= remaining;
            let dt = if landing { remaining } else { h };
            rk.step(&y, dt, &mut coarse);
            rk.step(&y, 0.5 * dt, &mut mid);
            rk.step(&mid, 0.5 * dt, &mut fine);
            let err = max_abs(&(&fine - &coarse)) / 15.0;
            let size = max_abs(&fine).max(max_abs(&y)).max(f64::MIN_POSITIVE);
            let ratio = err / (opts.tolerance * size);
            if ratio <= 1.0 {
                observer(&Step { t, h: dt, start: &y, mid: &mid, end: &fine });
                t = if landing { target } else { t + dt };
                core::mem::swap(&mut y, &mut fine);
                error_bound += err;
                steps += 1;
                if !landing || dt >= h {
                    let grow = if ratio == 0.0 { 4.0 } else { (0.9 * libm::pow(ratio, -0.2)).clamp(0.2, 4.0) };
                    h = (dt * grow).min(max_step);
                }
            } else {
                let shrink = (0.9 * libm::pow(ratio, -0.25)).clamp(0.1, 0.9);
                h = dt * shrink;
                if h < MIN_STEP {
                    return Err(Error::Stiffness { time: t, step: h });
                }
            }
        }
        times.push(target);
        states.push(DensityMatrix::from_raw(y.clone()));
    }

    let tol = 1e-10 + 10.0 * error_bound;
    let last = states.last().expect("at least one sample").as_matrix().clone();
    DensityMatrix::with_tolerance(last, tol)?;
    Ok(Trajectory { times, states, error_bound, steps })
}

/// Default trajectory horizon: ten decay times of the slowest active sink,
/// `10 / (2Γ + min_{κ_m>0} κ_m)`, capped at `cap`.
pub fn default_horizon(sys: &TransportSystem, cap: f64) -> Option<f64> {
    let min_kappa = sys.trap_rates().iter().copied().filter(|&k| k > 0.0).fold(f64::INFINITY, f64::min);
    let min_kappa = if min_kappa.is_finite() { min_kappa } else { 0.0 };
    let rate = 2.0 * sys.recomb_rate() + min_kappa;
    if rate > 0.0 {
        Some((10.0 / rate).min(cap))
    } else if cap.is_finite() {
        Some(cap)
    } else {
        None
    }
}
