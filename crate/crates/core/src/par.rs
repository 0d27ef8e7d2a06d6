//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature the map runs on a rayon pool; without it, or
//! with [`Execution::Sequential`], it is a plain iterator. Output order always
//! follows input order, so results do not depend on the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "PDLSIM_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// `workers == 0` uses the rayon default (one per core).
    Parallel { workers: usize },
    /// Parallel with the worker count from [`WORKERS_ENV`], if set.
    #[default]
    FromEnv,
}

impl Execution {
    pub fn workers(workers: usize) -> Self {
        if workers == 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { workers }
        }
    }

    fn resolve(self) -> Result<Self> {
        match self {
            Execution::FromEnv => match std::env::var(WORKERS_ENV) {
                Ok(v) => v
                    .trim()
                    .parse::<usize>()
                    .map(Execution::workers)
                    .map_err(|_| Error::Config(format!("{WORKERS_ENV}={v} is not a worker count"))),
                Err(_) => Ok(Execution::Parallel { workers: 0 }),
            },
            other => Ok(other),
        }
    }
}

pub fn map_collect<T, U, F>(items: &[T], exec: Execution, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec.resolve()? {
        #[cfg(feature = "parallel")]
        Execution::Parallel { workers } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(|| items.par_iter().map(&f).collect()))
        }
        _ => Ok(items.iter().map(f).collect()),
    }
}
