// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

mod common;

use enaqt_core::dynamics::rhs_matrix;
use enaqt_core::linalg::{column_stack, hermitian_defect};
use enaqt_core::rng::CounterRng;
use enaqt_core::{CMatrix, Liouvillian, TransportSystem};
use nalgebra::linalg::Schur;
use num_complex::Complex64;
use proptest::prelude::*;

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn system_for(seed: u64, n: usize, dephasing: f64) -> TransportSystem {
    let mut rng = CounterRng::new(seed);
    common::random_system(&mut rng, n, 200.0, dephasing)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn superoperator_matches_rhs(seed in any::<u64>(), n in 1usize..=15, gamma in 0.0f64..50.0) {
        let sys = system_for(seed, n, gamma);
        let mut rng = CounterRng::new(seed ^ 0xABCD);
        let rho = common::random_hermitian(&mut rng, n);
        let l = Liouvillian::build(&sys);
        let via_l = l.apply(&rho);
        let via_rhs = rhs_matrix(&sys, &rho).unwrap();
        let scale = frobenius(&rho) * sys.effective_hamiltonian().iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(frobenius(&(via_l - via_rhs)) <= 1e-12 * scale);
    }

    #[test]
    fn generator_preserves_hermiticity(seed in any::<u64>(), n in 1usize..=8, gamma in 0.0f64..50.0) {
        let sys = system_for(seed, n, gamma);
        let mut rng = CounterRng::new(seed.rotate_left(7));
        let rho = common::random_hermitian(&mut rng, n);
        let d = rhs_matrix(&sys, &rho).unwrap();
        prop_assert!(hermitian_defect(&d) <= 1e-12 * frobenius(&d).max(1.0));
    }
}

#[test]
fn spectrum_is_dissipative() {
    for seed in 0..20u64 {
        let n = 2 + (seed as usize % 5);
        let sys = system_for(seed, n, 0.1 * seed as f64);
        let l = Liouvillian::build(&sys).into_matrix();
        let eig = Schur::new(l).eigenvalues().unwrap();
        let slowest = -(2.0 * sys.recomb_rate());
        for z in eig.iter() {
            // Uniform recombination shifts the whole spectrum by −2Γ.
            assert!(z.re <= slowest + 1e-9, "seed {seed}: eigenvalue {z}");
        }
    }
}

#[test]
fn column_stacking_convention() {
    // Entry (r, c) of an N×N matrix lands at index c·N + r.
    let m = CMatrix::from_fn(3, 3, |r, c| Complex64::new((10 * r + c) as f64, 0.0));
    let v = column_stack(&m);
    for r in 0..3 {
        for c in 0..3 {
            assert_eq!(v[c * 3 + r], m[(r, c)]);
        }
    }
}

#[test]
fn trace_functional_is_sink_outflow() {
    let sys = system_for(5, 4, 3.0);
    let l = Liouvillian::build(&sys);
    let mut rng = CounterRng::new(77);
    let rho = common::random_density(&mut rng, 4);
    let d_trace = l.trace_functional().dot(&column_stack(rho.as_matrix()));
    let outflow: f64 = (0..4)
        .map(|m| 2.0 * (sys.trap_rates()[m] + sys.recomb_rate()) * rho.as_matrix()[(m, m)].re)
        .sum();
    assert!((d_trace.re + outflow).abs() < 1e-12, "{d_trace} vs {outflow}");
}
