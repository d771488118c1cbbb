//! Replication drivers.
//!
//! Monte Carlo checks are written against [`Executor`] so the same code runs
//! sequentially here and on a thread pool in the `fraglab` crate. Results are
//! always returned in replication order, so every reduction downstream sees
//! the same sequence regardless of scheduling.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f(0), f(1), ..., f(count - 1)` and returns them in order.
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}
