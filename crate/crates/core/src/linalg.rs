// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra helpers.
//!
//! `vec()` always stacks columns: entry `(row, col)` of an `n×n` matrix maps
//! to index `col·n + row`. This is also nalgebra's storage order, so
//! stacking is a copy of the underlying slice.

use nalgebra::linalg::LU;
use nalgebra::{DMatrix, DVector, Dyn};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn column_stack(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unstack(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Largest entry of `|m − m†|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for c in 0..n {
        for r in 0..=c {
            let d = (m[(r, c)] - m[(c, r)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// `(m + m†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Induced 1-norm: largest absolute column sum.
pub fn norm_one(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn vector_norm_one(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// LU factorisation with partial pivoting plus a 1-norm condition estimate.
pub struct DenseLu {
    lu: LU<Complex64, Dyn, Dyn>,
    norm1: f64,
    dim: usize,
}

impl DenseLu {
    pub fn new(a: CMatrix) -> Self {
        let norm1 = norm_one(&a);
        let dim = a.nrows();
        Self { lu: a.lu(), norm1, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, b: &CVector) -> Option<CVector> {
        self.lu.solve(b)
    }

    /// Solves `A† x = b` with the existing factors (`P A = L U`).
    pub fn solve_adjoint(&self, b: &CVector) -> Option<CVector> {
        let u = self.lu.u();
        let l = self.lu.l();
        let w = u.ad_solve_upper_triangular(b)?;
        let mut x = l.ad_solve_lower_triangular(&w)?;
        self.lu.p().inv_permute_rows(&mut x);
        Some(x)
    }

    /// Estimate of `‖A‖₁·‖A⁻¹‖₁` (Hager's method with Higham's
    /// alternating-sign safeguard). Returns infinity for an exactly
    /// singular factorisation.
    pub fn condition_estimate(&self) -> f64 {
        match self.inverse_norm_estimate() {
            Some(inv) if inv.is_finite() => self.norm1 * inv,
            _ => f64::INFINITY,
        }
    }

    fn inverse_norm_estimate(&self) -> Option<f64> {
        let n = self.dim;
        if n == 0 {
            return Some(0.0);
        }
        let mut x = CVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
        let mut estimate = 0.0f64;
        for iter in 0..5 {
            let y = self.solve(&x)?;
            let current = vector_norm_one(&y);
            if iter > 0 && current <= estimate {
                break;
            }
            estimate = current;
            let sign = y.map(|v| {
                let r = v.norm();
                if r == 0.0 {
                    ONE
                } else {
                    v / r
                }
            });
            let z = self.solve_adjoint(&sign)?;
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(k, v)| (k, v.norm()))
                .fold((0, -1.0), |acc, p| if p.1 > acc.1 { p } else { acc });
            let ztx = z.dotc(&x).re;
            if iter > 0 && zmax <= ztx {
                break;
            }
            x.fill(ZERO);
            x[j] = ONE;
        }
        let alt: CVector = DVector::from_iterator(
            n,
            (0..n).map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let mag = if n > 1 { 1.0 + i as f64 / (n - 1) as f64 } else { 1.0 };
                Complex64::new(sign * mag, 0.0)
            }),
        );
        let alt_est = 2.0 * vector_norm_one(&self.solve(&alt)?) / (3.0 * n as f64);
        Some(estimate.max(alt_est))
    }
}

/// Solves the Sylvester-type equation `−i(T X − X T†) − γ X = Y` for upper
/// triangular `T` by back substitution, overwriting `y` with `X`.
///
/// Row `j` and column `k` are processed from the bottom-right corner; entry
/// `(j, k)` needs `X[l, k]` for `l > j` and `X[j, l]` for `l > k`.
pub(crate) fn solve_triangular_lindblad(t: &CMatrix, gamma: f64, y: &mut CMatrix) {
    let n = t.nrows();
    let shift = Complex64::new(0.0, -gamma);
    for j in (0..n).rev() {
        for k in (0..n).rev() {
            let mut acc = I * y[(j, k)];
            for l in (j + 1)..n {
                acc -= t[(j, l)] * y[(l, k)];
            }
            for l in (k + 1)..n {
                acc += y[(j, l)] * t[(k, l)].conj();
            }
            let denom = t[(j, j)] - t[(k, k)].conj() + shift;
            y[(j, k)] = acc / denom;
        }
    }
}

/// Solves a small dense system, returning `None` when singular.
pub(crate) fn solve_small(a: CMatrix, b: &CVector) -> Option<CVector> {
    a.lu().solve(b)
}
