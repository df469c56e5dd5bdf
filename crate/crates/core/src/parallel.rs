//! Thin fan-out layer. Results are collected in index order, so every caller
//! is deterministic for any worker count, including the serial fallback when
//! the `parallel` feature is off.

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Runs `body` inside a pool of `workers` threads; `None` uses the default
/// pool. Worker count never affects results, only wall time.
#[cfg(feature = "parallel")]
pub fn with_workers<R, F>(workers: Option<usize>, body: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match workers {
        None => Ok(body()),
        Some(0) => Err(Error::invalid("workers", "must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid("workers", e.to_string()))?;
            Ok(pool.install(body))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<R, F>(workers: Option<usize>, body: F) -> Result<R>
where
    F: FnOnce() -> R,
{
    match workers {
        Some(0) => Err(Error::invalid("workers", "must be at least 1")),
        _ => Ok(body()),
    }
}
