// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Host-side companion to `enaqt-core`: parallel sweeps, file formats, run
//! manifests and the `enaqt` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fmo_study;
pub mod io;
pub mod sweep;

pub use enaqt_core as core;
pub use error::{Error, Result};
pub use sweep::{run_all, run_sweep, SweepPlan, TaskContext, TaskFailure, TaskResult};
