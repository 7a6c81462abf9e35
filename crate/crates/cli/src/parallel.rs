//! Rayon-backed executor for the core solvers.

use anyhow::{Context, Result};
use privex_core::exec::ParallelMap;
use rayon::prelude::*;

/// Runs work items on a dedicated thread pool; results keep input order.
pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    /// `threads == 0` uses every available core.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .context("cannot start thread pool")?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl ParallelMap for Pool {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}
