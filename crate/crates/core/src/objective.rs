//! The cost-oracle contract shared by the optimizers.

use std::sync::atomic::{AtomicU64, Ordering};

/// Cost reported for infeasible points (unstable, ill-posed, outside the
/// domain). It is finite so that comparisons in line searches stay total.
pub const SENTINEL: f64 = 1e12;

/// A scalar cost on `ℝ^d`. Implementations must be pure: the same input
/// always yields the same value.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;

    fn sentinel(&self) -> f64 {
        SENTINEL
    }

    fn is_feasible_value(&self, v: f64) -> bool {
        v.is_finite() && v < self.sentinel()
    }
}

impl<O: Objective + ?Sized> Objective for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn sentinel(&self) -> f64 {
        (**self).sentinel()
    }
}

/// Wraps a closure as an [`Objective`]; non-finite outputs map to the sentinel.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

pub fn from_fn<F: Fn(&[f64]) -> f64 + Sync>(dim: usize, f: F) -> FnObjective<F> {
    FnObjective { dim, f }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        if v.is_finite() {
            v.min(SENTINEL)
        } else {
            SENTINEL
        }
    }
}

/// Counts every evaluation of the wrapped objective.
pub struct CountingObjective<O> {
    inner: O,
    calls: AtomicU64,
}

impl<O: Objective> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, calls: AtomicU64::new(0) }
    }
    pub fn inner(&self) -> &O {
        &self.inner
    }
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<O: Objective> Objective for CountingObjective<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.value(x)
    }
    fn sentinel(&self) -> f64 {
        self.inner.sentinel()
    }
}
