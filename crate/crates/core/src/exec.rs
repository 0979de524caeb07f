//! Data-parallel execution. With the `parallel` feature (default) work is
//! spread over a rayon pool; without it everything runs on the calling
//! thread. Results never depend on which path or how many workers ran them.

use std::ops::Range;

#[cfg(feature = "parallel")]
use crate::error::Error;
use crate::error::Result;

/// `range.map(f).collect()`, in index order.
#[cfg(feature = "parallel")]
pub fn map_range<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    range.map(f).collect()
}

/// Runs `op` with `workers` threads available to [`map_range`]; `None`
/// keeps the ambient pool.
#[cfg(feature = "parallel")]
pub fn with_workers<R, F>(workers: Option<usize>, op: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match workers {
        None => Ok(op()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::ThreadPool(e.to_string()))?;
            Ok(pool.install(op))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<R, F>(_workers: Option<usize>, op: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    Ok(op())
}

/// Threads [`map_range`] would use right now.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
