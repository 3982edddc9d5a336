//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature, work is spread over the global rayon pool.
//! Without it, the same closures run on the calling thread. Results are
//! always returned in index order, so callers stay deterministic either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(0..n)` and collects the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Maps `f` over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Applies `f` to every element of `data` together with its index.
///
/// Small slices are always processed sequentially since the split overhead
/// dominates below a few thousand elements.
pub fn for_each_indexed_mut<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if data.len() >= PAR_THRESHOLD {
            data.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
            return;
        }
    }
    data.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

/// Applies `f` to consecutive chunks of `data`, passing the chunk index.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if data.len() >= PAR_THRESHOLD {
            data.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
    }
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Sums `f(i)` over `0..n`.
///
/// The parallel reduction tree differs from a left fold, so results may
/// differ in the last bits between the two builds but not between runs.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n >= PAR_THRESHOLD {
            return (0..n)
                .into_par_iter()
                .with_min_len(PAR_THRESHOLD / 4)
                .map(f)
                .sum();
        }
    }
    (0..n).map(f).sum()
}

/// Runs `op` with data parallelism disabled.
///
/// Under the `parallel` feature this installs a one-thread rayon pool, which
/// is how the benchmarks compare both execution modes from one binary.
pub fn sequential<R, F>(op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("single-thread pool")
            .install(op)
    }
    #[cfg(not(feature = "parallel"))]
    {
        op()
    }
}

/// Whether this build dispatches to rayon.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 1 << 14;
