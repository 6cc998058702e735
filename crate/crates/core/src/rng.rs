// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Counter-based random numbers with a bit-exact, platform-independent
//! definition.
//!
//! Draw `k` of a stream keyed by `key` is `mix64(key + (k+1)·φ)` where
//! `mix64` is the SplitMix64 finaliser and `φ = 0x9E3779B97F4A7C15`.
//! Normal deviates use the Box–Muller transform evaluated with `libm`, so
//! the same key yields the same bits on every target.

use core::f64::consts::PI;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable hash of a master seed and a path of indices.
///
/// Used both for per-task seeds in parameter sweeps and for disorder
/// realisations keyed by `(master, δ index, sample index)`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = mix64(master ^ 0x5EED_5EED_5EED_5EED);
    for (depth, &p) in path.iter().enumerate() {
        h = mix64(h ^ mix64(p.wrapping_add((depth as u64 + 1).wrapping_mul(GOLDEN_GAMMA))));
    }
    h
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
    spare_normal: Option<f64>,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0, spare_normal: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate (Box–Muller, pairs cached).
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * PI * u2;
        self.spare_normal = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }
}
