// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fast repeated evaluation of the transport integrals over many dephasing
//! rates for one Hamiltonian.
//!
//! Write the generator as `L = A + γ·(diag − id)` with the coherent part
//! `A(X) = −i(H X − X H†)` and let `M = A − γ`. After one Schur
//! decomposition `H = Q T Q†`, `M` is inverted by triangular back
//! substitution in O(N³). The dephasing coupling only touches the N diagonal
//! entries, so `L(S) = −b` reduces to an N×N system for `d = diag(S)`:
//!
//! ```text
//! K d = r,   K_km = [M⁻¹(A(|m⟩⟨m|))]_kk,   r_k = [M⁻¹(−b)]_kk
//! S = D + M⁻¹(−b − A(D)),   D = diag(d)
//! ```
//!
//! `K` equals `I + γ·diag∘M⁻¹` but is assembled without forming that sum,
//! which would cancel catastrophically once γ dwarfs the Hamiltonian (the
//! Zeno regime). Each rate costs O(N⁴) instead of the O(N⁶) of a dense
//! Liouvillian solve.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::linalg::Schur;
use num_complex::Complex64;

use crate::dynamics::IntegratedState;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, solve_small, solve_triangular_lindblad, CMatrix, CVector, ZERO};
use crate::model::{DensityMatrix, TransportSystem};
use crate::observables::TransportResult;

pub struct DephasingScan {
    n: usize,
    h: CMatrix,
    q: CMatrix,
    q_adj: CMatrix,
    t: CMatrix,
    rho0: CMatrix,
    sys: TransportSystem,
}

/// Deflation thresholds tried in turn. Exactly degenerate spectra, such as
/// symmetric trees, stall the QR sweep at machine epsilon.
const SCHUR_THRESHOLDS: [f64; 5] = [f64::EPSILON, 1e-14, 1e-13, 1e-12, 1e-10];

/// Largest accepted `‖Q T Q† − H‖ / ‖H‖`.
const SCHUR_RESIDUAL: f64 = 1e-11;

/// Complex Schur form `H = Q T Q†` with `T` strictly upper triangular.
fn schur(h: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let mut worst = f64::INFINITY;
    for eps in SCHUR_THRESHOLDS {
        let Some(s) = Schur::try_new(h.clone(), eps, 10_000) else { continue };
        let (q, mut t) = s.unpack();
        t.fill_lower_triangle(ZERO, 1);
        let residual = (&q * &t * q.adjoint() - h).norm() / scale;
        if residual <= SCHUR_RESIDUAL {
            return Ok((q, t));
        }
        worst = worst.min(residual);
    }
    Err(Error::NumericalConsistency(format!(
        "Schur decomposition did not converge (best residual {worst:e})"
    )))
}

impl DephasingScan {
    /// Prepares the scan for `sys` (its own dephasing rate is ignored).
    pub fn new(sys: &TransportSystem, rho0: &DensityMatrix) -> Result<Self> {
        let n = sys.n_sites();
        if rho0.n_sites() != n {
            return Err(Error::Config(format!(
                "initial state has {} sites, system has {n}",
                rho0.n_sites()
            )));
        }
        if !sys.has_sink() {
            return Err(Error::NonConvergentIntegral { condition: f64::INFINITY });
        }
        let h = sys.effective_hamiltonian();
        let (q, t) = schur(&h)?;
        Ok(Self {
            n,
            h,
            q_adj: q.adjoint(),
            q,
            t,
            rho0: rho0.as_matrix().clone(),
            sys: sys.clone(),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// `M_γ⁻¹(y)` in the site basis.
    fn inverse_coherent(&self, y: &CMatrix, gamma: f64) -> CMatrix {
        let mut x = &self.q_adj * y * &self.q;
        solve_triangular_lindblad(&self.t, gamma, &mut x);
        &self.q * x * &self.q_adj
    }

    /// `A(X) = −i(H X − X H†)` in the site basis.
    fn coherent(&self, x: &CMatrix) -> CMatrix {
        (&self.h * x - x * self.h.adjoint()) * Complex64::new(0.0, -1.0)
    }

    /// `K_km = [M⁻¹(A(|m⟩⟨m|))]_kk`, computed in the Schur basis.
    fn diagonal_operator(&self, gamma: f64) -> CMatrix {
        let n = self.n;
        let minus_i = Complex64::new(0.0, -1.0);
        let mut k_mat = CMatrix::zeros(n, n);
        for m in 0..n {
            // Q†|m⟩⟨m|Q = u u† with u = Q† e_m.
            let u = self.q_adj.column(m);
            let x = u * u.adjoint();
            let tx = &self.t * &x;
            let mut y = (&tx - tx.adjoint()) * minus_i;
            solve_triangular_lindblad(&self.t, gamma, &mut y);
            for k in 0..n {
                // [Q Y Q†]_kk
                let mut acc = ZERO;
                for a in 0..n {
                    let mut inner = ZERO;
                    for b in 0..n {
                        inner += y[(a, b)] * self.q[(k, b)].conj();
                    }
                    acc += self.q[(k, a)] * inner;
                }
                k_mat[(k, m)] = acc;
            }
        }
        k_mat
    }

    /// Solves `L(S) = −b` for the full matrix S.
    fn solve(&self, b: &CMatrix, gamma: f64, k_mat: Option<&CMatrix>) -> Result<CMatrix> {
        let n = self.n;
        let base = self.inverse_coherent(&(-b), gamma);
        if gamma == 0.0 {
            return Ok(base);
        }
        let r = CVector::from_fn(n, |k, _| base[(k, k)]);
        let k_mat = k_mat.expect("diagonal operator for γ > 0").clone();
        let d = solve_small(k_mat, &r).ok_or(Error::NonConvergentIntegral { condition: f64::INFINITY })?;
        let dm = CMatrix::from_diagonal(&d);
        let rhs = -b - self.coherent(&dm);
        Ok(dm + self.inverse_coherent(&rhs, gamma))
    }

    fn check_gamma(gamma: f64) -> Result<()> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("dephasing rate must be finite and >= 0, got {gamma}")));
        }
        Ok(())
    }

    /// Population integrals `∫ρ_mm dt` only (enough for η and the loss).
    pub fn site_integrals(&self, gamma: f64) -> Result<Vec<f64>> {
        Self::check_gamma(gamma)?;
        let n = self.n;
        let base = self.inverse_coherent(&(-&self.rho0), gamma);
        let r = CVector::from_fn(n, |k, _| base[(k, k)]);
        let d = if gamma == 0.0 {
            r
        } else {
            solve_small(self.diagonal_operator(gamma), &r).ok_or(Error::NonConvergentIntegral { condition: f64::INFINITY })?
        };
        let out: Vec<f64> = d.iter().map(|z| z.re).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergentIntegral { condition: f64::INFINITY });
        }
        Ok(out)
    }

    /// `η(γ) = 2 Σ κ_m ∫ρ_mm dt`.
    pub fn efficiency(&self, gamma: f64) -> Result<f64> {
        let d = self.site_integrals(gamma)?;
        let eta: f64 = 2.0 * self.sys.trap_rates().iter().zip(&d).map(|(k, s)| k * s).sum::<f64>();
        crate::observables::clamp_efficiency(eta)
    }

    /// Both integrals at rate `gamma`.
    pub fn integrated_state(&self, gamma: f64) -> Result<IntegratedState> {
        Self::check_gamma(gamma)?;
        let k = if gamma == 0.0 { None } else { Some(self.diagonal_operator(gamma)) };
        let first = hermitian_part(&self.solve(&self.rho0, gamma, k.as_ref())?);
        let second = hermitian_part(&self.solve(&first, gamma, k.as_ref())?);
        if first.iter().chain(second.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonConvergentIntegral { condition: f64::INFINITY });
        }
        Ok(IntegratedState { first, second })
    }

    pub fn evaluate(&self, gamma: f64) -> Result<TransportResult> {
        TransportResult::from_integrals(&self.sys, &self.integrated_state(gamma)?)
    }
}
