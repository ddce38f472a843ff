//! Data-parallel helpers for embarrassingly parallel workloads (Monte Carlo
//! trials, region grids). With the default `parallel` feature the work is
//! spread over the rayon pool; without it the same call runs sequentially.
//! Results are returned in index order either way, so aggregation is
//! independent of thread count.

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    (0..count).map(f).collect()
}

/// Always-sequential variant, kept available so benchmarks can compare the
/// two paths within one build.
pub fn map_indexed_sequential<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    (0..count).map(f).collect()
}
