//! Deterministic fan-out over indexed work items.

use alloc::vec::Vec;

/// Applies `f` to `0..n` and collects the results in index order.
///
/// With the `parallel` feature and `workers > 1` the items run on a rayon
/// pool of that size; output is identical to the sequential order because
/// each item depends only on its index.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build();
    match pool {
        Ok(pool) => pool.install(|| {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }),
        Err(_) => (0..n).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, _workers: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
