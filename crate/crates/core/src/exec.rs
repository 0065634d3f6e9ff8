//! Fan-out of independent per-path work.
//!
//! Results always come back in index order, so aggregation downstream never
//! depends on scheduling. Without the `parallel` feature every mode runs on
//! the calling thread.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with this many workers.
    Threads(usize),
}

impl Execution {
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            Some(1) => Execution::Sequential,
            Some(k) => Execution::Threads(k),
            None => Execution::Parallel,
        }
    }
}

/// `(0..count).map(job)` under the chosen execution mode.
pub fn map_indexed<T, F>(count: usize, mode: Execution, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        Execution::Sequential => (0..count).map(job).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => par_map(count, &job),
        #[cfg(feature = "parallel")]
        Execution::Threads(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| par_map(count, &job)),
            Err(e) => {
                log::warn!("could not build a {k}-thread pool ({e}); using the global pool");
                par_map(count, &job)
            }
        },
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel | Execution::Threads(_) => (0..count).map(job).collect(),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(count: usize, job: &F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(job).collect()
}
