//! Data-parallel helpers with a sequential fallback.
//!
//! Every grid-level loop in the crate goes through this module. With the
//! `parallel` feature (default) the loops run on the rayon pool; without it
//! they run sequentially. Floating-point *sums* are always sequential so
//! results are bit-identical regardless of thread count; only elementwise
//! maps, sup-norms and independent per-item work are parallelized.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f(index, element)` to every element of a mutable slice.
#[cfg(feature = "parallel")]
pub fn for_each_indexed<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    data.par_iter_mut().with_min_len(512).enumerate().for_each(|(i, x)| f(i, x));
}

#[cfg(not(feature = "parallel"))]
pub fn for_each_indexed<T, F>(data: &mut [T], f: F)
where
    F: Fn(usize, &mut T),
{
    data.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

/// Apply `f` to every fixed-size mutable chunk (e.g. one point's coordinates).
#[cfg(feature = "parallel")]
pub fn for_each_chunk<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    data.par_chunks_mut(chunk)
        .with_min_len(256)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "parallel"))]
pub fn for_each_chunk<T, F>(data: &mut [T], chunk: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Map `f` over `0..len` into a freshly allocated vector.
#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..len).into_par_iter().with_min_len(64).map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(len: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..len).map(f).collect()
}

/// Maximum of `f(i)` over `0..len`; 0.0 for an empty range. Exact under
/// any evaluation order.
#[cfg(feature = "parallel")]
pub fn max_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..len)
        .into_par_iter()
        .with_min_len(512)
        .map(f)
        .reduce(|| f64::NEG_INFINITY, f64::max)
        .max(0.0)
}

#[cfg(not(feature = "parallel"))]
pub fn max_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    (0..len).map(f).fold(f64::NEG_INFINITY, f64::max).max(0.0)
}

/// Support for benchmarks: run a closure on a single-threaded pool so the
/// rayon code path can be timed against its sequential schedule.
#[cfg(feature = "parallel")]
pub fn run_single_threaded<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool")
        .install(f)
}

#[cfg(not(feature = "parallel"))]
pub fn run_single_threaded<R>(f: impl FnOnce() -> R) -> R {
    f()
}
