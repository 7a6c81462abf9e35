//! Pluggable execution of independent work items.
//!
//! Solvers hand their restarts and sweep points to a [`ParallelMap`]. Output
//! order always follows input order, so results do not depend on how the
//! work was scheduled.

use alloc::vec::Vec;

pub trait ParallelMap: Sync {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ParallelMap for Sequential {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.iter().map(f).collect()
    }
}
