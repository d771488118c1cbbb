//! Thread-pool executor for replications.

use fraglab_core::Executor;
use rayon::prelude::*;

use crate::error::CliError;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "FRAGLAB_THREADS";

/// Runs replications on a dedicated rayon pool. Results come back in index
/// order, so reports do not depend on the thread count.
#[derive(Debug)]
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(threads: Option<usize>) -> Result<Self, CliError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            builder = builder.num_threads(t);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::config(THREADS_VAR, format!("cannot start thread pool: {e}")))?;
        Ok(Parallel { pool })
    }

    /// Reads [`THREADS_VAR`]; unset means one thread per core.
    pub fn from_env() -> Result<Self, CliError> {
        Parallel::new(threads_from(std::env::var(THREADS_VAR).ok().as_deref())?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

pub fn threads_from(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::config(
                THREADS_VAR,
                format!("expected a positive integer, got {v:?}"),
            )),
        },
    }
}

impl Executor for Parallel {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}
