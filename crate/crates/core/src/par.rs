//! Data-parallel helpers. With the `parallel` feature the work is spread
//! over the current rayon pool; without it everything runs in order on the
//! calling thread. Both paths return results in input order.

/// Below this many items the sequential path is used even when parallelism
/// is enabled; per-item work on small DBMs is too cheap to amortize a split.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_ITEMS: usize = 8;

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if items.len() < MIN_PARALLEL_ITEMS {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if n < MIN_PARALLEL_ITEMS {
        (0..n).map(f).collect()
    } else {
        (0..n).into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn all_range<F>(n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    use rayon::prelude::*;
    if n < MIN_PARALLEL_ITEMS {
        (0..n).all(f)
    } else {
        (0..n).into_par_iter().all(f)
    }
}

#[cfg(not(feature = "parallel"))]
pub fn all_range<F>(n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    (0..n).all(f)
}

/// Whether this build runs the parallel paths.
pub const fn enabled() -> bool {
    cfg!(feature = "parallel")
}
