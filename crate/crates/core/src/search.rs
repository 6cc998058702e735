// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Grids and one-dimensional maximisation.

use alloc::vec::Vec;

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (a, b) = (libm::log10(lo), libm::log10(hi));
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else if i == 0 {
                        lo
                    } else {
                        libm::pow(10.0, a + (b - a) * i as f64 / (n - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[a, b]`, stopping once the
/// bracket is narrower than `tol`. Returns the best point seen and its value.
///
/// Evaluation errors abort the search.
pub fn golden_section_maximize<F, E>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    if a > b {
        core::mem::swap(&mut a, &mut b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let (mut best_x, mut best_f) = if fc >= fd { (c, fc) } else { (d, fd) };
    let mut guard = 0;
    while (b - a) > tol && guard < 200 {
        guard += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            if fc > best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            if fd > best_f {
                best_x = d;
                best_f = fd;
            }
        }
    }
    Ok((best_x, best_f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_endpoints() {
        let g = log_grid(1e-3, 1e5, 60);
        assert_eq!(g.len(), 60);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[59], 1e5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let l = linear_grid(0.0, 4.0, 20);
        assert_eq!(l[19], 4.0);
        assert!((l[1] - 4.0 / 19.0).abs() < 1e-15);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) =
            golden_section_maximize::<_, ()>(|x| Ok(-(x - 1.3) * (x - 1.3) + 2.0), -4.0, 7.0, 1e-8).unwrap();
        assert!((x - 1.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_propagates_errors() {
        let r = golden_section_maximize(|x| if x > 0.5 { Err("boom") } else { Ok(x) }, 0.0, 1.0, 1e-6);
        assert_eq!(r, Err("boom"));
    }
}
