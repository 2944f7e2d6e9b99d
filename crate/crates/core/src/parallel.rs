//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the loops below fan out over the rayon pool;
//! without it they run on the calling thread. Work is always partitioned into
//! the same fixed chunks and partial results are combined in index order, so
//! both builds (and any pool size) produce bit-identical floating-point
//! results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed chunk length used by [`chunked_sum`]. Part of the determinism
/// contract: changing it changes rounding.
pub const SUM_CHUNK: usize = 4096;

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

/// Maps over a slice, preserving order.
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

/// Pairwise (cascade) summation; error grows as O(log n) ulps.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sums `f(0..n)` in fixed chunks of [`SUM_CHUNK`] terms. Each chunk is
/// summed pairwise, then the chunk totals are summed pairwise in order.
pub fn chunked_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(SUM_CHUNK);
    let partial = map_indexed(chunks, |c| {
        let start = c * SUM_CHUNK;
        let end = (start + SUM_CHUNK).min(n);
        let terms: Vec<f64> = (start..end).map(&f).collect();
        pairwise_sum(&terms)
    });
    pairwise_sum(&partial)
}
