//! Execution strategy for embarrassingly parallel loops.
//!
//! Stochastic routines in this crate derive a random substream from the loop
//! index, so any executor that returns results in index order reproduces the
//! sequential output bit for bit.

use alloc::vec::Vec;

pub trait Executor {
    /// Evaluates `f(0), f(1), ..., f(n - 1)` and returns them in index order.
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
