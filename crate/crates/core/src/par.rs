//! Execution helpers: data-parallel sweeps on the rayon pool when the
//! `parallel` feature is enabled, plain sequential loops otherwise.
//!
//! Every helper is order-deterministic — the parallel and sequential paths
//! return identical results, and results do not depend on the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to each index in `0..n` and returns the first (lowest-index)
/// `Some`, together with its index.
pub fn find_first_map<T, F>(n: usize, f: F) -> Option<(usize, T)>
where
    F: Fn(usize) -> Option<T> + Sync + Send,
    T: Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().find_map_first(|i| f(i).map(|t| (i, t)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(|i| f(i).map(|t| (i, t)))
    }
}

/// Maps `0..n` through `f`, preserving index order in the result.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// True when `f` holds for every index in `0..n`.
pub fn all_indexed<F>(n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().all(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).all(f)
    }
}
