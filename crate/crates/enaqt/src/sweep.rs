// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic parallel map over indexed tasks.
//!
//! Results always come back in task order, each task gets a seed derived
//! from the master seed and its index only, and a failing or panicking task
//! never takes its siblings down.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use enaqt_core::rng::derive_seed;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SweepPlan<T> {
    pub tasks: Vec<T>,
    pub master_seed: u64,
    /// Worker threads; 0 picks the machine's parallelism.
    pub width: usize,
    /// Largest tolerated fraction of failed tasks.
    pub max_failure_fraction: f64,
}

impl<T> SweepPlan<T> {
    pub fn new(tasks: Vec<T>) -> Self {
        Self { tasks, master_seed: 0, width: 0, max_failure_fraction: 0.0 }
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_width(mut self, width: usize) -> Self {
        self.width = width;
        self
    }

    pub fn with_failure_tolerance(mut self, fraction: f64) -> Self {
        self.max_failure_fraction = fraction;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskContext {
    pub index: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskFailure {
    Error(String),
    Panic(String),
}

impl fmt::Display for TaskFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskFailure::Error(m) => write!(f, "{m}"),
            TaskFailure::Panic(m) => write!(f, "panic: {m}"),
        }
    }
}

pub type TaskResult<R> = std::result::Result<R, TaskFailure>;

pub fn task_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, &[index as u64])
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

/// Runs every task and returns one slot per task, in index order.
///
/// Errors only when the failure fraction exceeds the plan's threshold.
pub fn run_sweep<T, R, E, F>(plan: &SweepPlan<T>, task_fn: F) -> Result<Vec<TaskResult<R>>>
where
    T: Sync,
    R: Send,
    E: fmt::Display,
    F: Fn(&TaskContext, &T) -> std::result::Result<R, E> + Sync,
{
    let run_one = |(index, task): (usize, &T)| -> TaskResult<R> {
        let ctx = TaskContext { index, seed: task_seed(plan.master_seed, index) };
        match catch_unwind(AssertUnwindSafe(|| task_fn(&ctx, task))) {
            Ok(Ok(r)) => Ok(r),
            Ok(Err(e)) => Err(TaskFailure::Error(e.to_string())),
            Err(payload) => Err(TaskFailure::Panic(panic_message(payload))),
        }
    };
    let results: Vec<TaskResult<R>> = if plan.width == 1 {
        plan.tasks.iter().enumerate().map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(plan.width)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| plan.tasks.par_iter().enumerate().map(run_one).collect())
    };

    let failed = results.iter().filter(|r| r.is_err()).count();
    let total = results.len();
    if failed > 0 {
        let allowed = plan.max_failure_fraction;
        if failed as f64 > allowed * total as f64 {
            let first = results.iter().find_map(|r| r.as_ref().err()).expect("a failure").to_string();
            return Err(Error::TooManyFailures { failed, total, allowed, first });
        }
        log::warn!("{failed} of {total} tasks failed");
    }
    Ok(results)
}

/// [`run_sweep`] where any failed task is an error.
pub fn run_all<T, R, E, F>(plan: &SweepPlan<T>, task_fn: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    E: fmt::Display,
    F: Fn(&TaskContext, &T) -> std::result::Result<R, E> + Sync,
{
    let results = run_sweep(plan, task_fn)?;
    let total = results.len();
    let failed = results.iter().filter(|r| r.is_err()).count();
    let mut out = Vec::with_capacity(total);
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err(e) => {
                return Err(Error::TooManyFailures { failed, total, allowed: 0.0, first: e.to_string() })
            }
        }
    }
    Ok(out)
}
