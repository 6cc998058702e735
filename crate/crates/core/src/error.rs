// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

/// Everything that can go wrong while building or solving a transport problem.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("step size underflow at t = {time} ps (step {step:e} ps); the system is too stiff for the explicit integrator")]
    Stiffness { time: f64, step: f64 },

    #[error("non-convergent integral: the Liouvillian is numerically singular (condition estimate {condition:e}); most likely no trap or recombination channel is reachable from the initial state")]
    NonConvergentIntegral { condition: f64 },

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("transfer time is undefined for efficiency {0:e}")]
    UndefinedTransferTime(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("a generation-{generation} tree exceeds the dense Liouvillian budget (generation <= {max}); set the large-system override to proceed")]
    SizeGuard { generation: u32, max: u32 },

    #[error("sites are decoupled (V = 0): pure dephasing alone conserves site populations")]
    NoMixing,

    #[error("estimate undefined: {0}")]
    UndefinedEstimate(String),

    #[error("data integrity error: expected sha256 {expected}, found {found}")]
    DataIntegrity { expected: String, found: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = core::result::Result<T, Error>;
