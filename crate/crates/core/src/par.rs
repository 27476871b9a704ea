//! Data-parallel helpers with a runtime switch to sequential execution.
//!
//! All maps preserve input order, so any reduction performed afterwards sees
//! the same sequence of values regardless of the execution mode.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Parallel,
    Sequential,
}

static MODE: AtomicU8 = AtomicU8::new(0);

pub fn set_execution(mode: Execution) {
    let v = match mode {
        Execution::Parallel => 0,
        Execution::Sequential => 1,
    };
    MODE.store(v, Ordering::Relaxed);
}

/// The effective mode. Always sequential when built without the `parallel` feature.
pub fn execution() -> Execution {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == 0 {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

/// Caps the global worker pool. Has no effect without the `parallel` feature.
pub fn init_threads(n: usize) -> crate::Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if execution() == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Order-preserving fallible map; returns the first error in input order.
pub fn try_map<T, R, F>(items: &[T], f: F) -> crate::Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> crate::Result<R> + Sync + Send,
{
    map(items, f).into_iter().collect()
}
