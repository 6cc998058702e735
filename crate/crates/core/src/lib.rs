// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dephasing-assisted excitation transport on tight-binding networks.
//!
//! A single excitation hops between sites under a tight-binding Hamiltonian,
//! loses phase coherence through site-local pure dephasing (Haken–Strobl),
//! and leaves the network either through trap sites or through uniform
//! recombination. Both sinks enter as anti-Hermitian diagonal terms of an
//! effective Hamiltonian.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, the parallel sweep executor and the
//! command-line driver live in the `enaqt` companion crate.
//!
//! Units: site energies and couplings are wavenumbers (cm⁻¹), rates are
//! ps⁻¹. Energies are converted to angular frequencies with
//! [`UnitConvention`] before any dynamics is evaluated, so internally ħ = 1
//! and time is measured in picoseconds.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod fmo;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod rng;
pub mod scan;
pub mod search;
pub mod spectral;
pub mod stats;
pub mod tree;
pub mod two_level;
pub mod units;

pub use dynamics::{
    integrated_state, master_equation_rhs, propagate, propagate_observed, IntegratedState,
    Liouvillian, PropagateOptions, Step, Trajectory,
};
pub use error::{Error, Result};
pub use fmo::{FmoHamiltonian, FmoModel, FmoOverrides};
pub use linalg::{CMatrix, CVector};
pub use model::{DensityMatrix, InitialState, TransportSystem};
pub use observables::{efficiency, loss_probability, transfer_time, TransportResult};
pub use scan::DephasingScan;
pub use spectral::{DephasingRate, OhmicBath};
pub use tree::{InitialKind, OptimalDephasing, SearchConfig, TreeSeed, TreeSpec};
pub use two_level::TwoLevelParams;
pub use units::UnitConvention;
