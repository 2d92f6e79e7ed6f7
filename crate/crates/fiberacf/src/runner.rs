//! Parallel trial execution.

use fiberacf_core::mc::TrialRunner;
use rayon::prelude::*;

/// Runs trials on a dedicated rayon pool. Results come back in trial order,
/// so estimates are bit-identical for any thread count.
pub struct RayonRunner {
    pool: rayon::ThreadPool,
}

impl RayonRunner {
    /// `threads = 0` uses one worker per available core.
    pub fn new(threads: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(RayonRunner { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl TrialRunner for RayonRunner {
    fn run<T, F>(&self, trials: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..trials).into_par_iter().map(f).collect())
    }
}
