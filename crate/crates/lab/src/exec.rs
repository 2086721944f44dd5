//! Rayon-backed executor for the core's sharded integrators.

use hkakeya::sampling::ShardExecutor;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

/// A private worker pool. Shard results come back in index order, so the
/// worker count never changes a reduction.
pub struct Pool {
    inner: ThreadPool,
}

impl Pool {
    /// `None` or `Some(0)` uses the hardware parallelism.
    pub fn new(workers: Option<usize>) -> Result<Self, ThreadPoolBuildError> {
        let inner = ThreadPoolBuilder::new().num_threads(workers.unwrap_or(0)).build()?;
        Ok(Pool { inner })
    }

    pub fn workers(&self) -> usize {
        self.inner.current_num_threads()
    }
}

impl ShardExecutor for Pool {
    fn map_shards<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        self.inner.install(|| (0..count).into_par_iter().map(&f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_index_order() {
        let pool = Pool::new(Some(4)).unwrap();
        assert_eq!(pool.workers(), 4);
        let out = pool.map_shards(1000, |i| i * i);
        assert!(out.iter().enumerate().all(|(i, &v)| v == i * i));
    }
}
