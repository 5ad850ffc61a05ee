use frailhaz_core::Executor;
use rayon::prelude::*;

/// Runs loops on a rayon pool. Results come back in index order, so output
/// matches [`frailhaz_core::Sequential`] exactly.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `threads == 0` lets rayon choose.
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to start thread pool");
        RayonExecutor { pool }
    }

    /// Thread count from `FRAILHAZ_THREADS` (unset, empty or 0 means automatic).
    pub fn from_env() -> Self {
        let threads = std::env::var("FRAILHAZ_THREADS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(0);
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool
            .install(|| (0..n).into_par_iter().map(f).collect())
    }
}
