//! Data-parallel helpers with a sequential fallback.
//!
//! With the default `parallel` feature the helpers fan work out over rayon;
//! without it they run plain sequential loops. Both paths return results in
//! input order, and callers only ever combine them with order-independent or
//! order-fixed reductions, so the two builds — and any rayon worker count —
//! produce bit-identical results.

/// Applies `f` to every index in `0..n` and returns the results in index
/// order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Applies `f` to every index in `0..n` and returns the results in index
/// order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Splits `0..n` into chunks of `chunk` indices, maps each chunk to an
/// integer histogram of length `bins` via `f(start, end, &mut hist)`, and
/// sums the histograms. Addition of `u64` bins is associative and
/// commutative, so the reduction is schedule-independent.
#[cfg(feature = "parallel")]
pub fn histogram_chunked<F>(n: u64, chunk: u64, bins: usize, f: F) -> Vec<u64>
where
    F: Fn(u64, u64, &mut [u64]) + Sync + Send,
{
    use rayon::prelude::*;
    let chunks: Vec<(u64, u64)> = chunk_ranges(n, chunk);
    chunks
        .into_par_iter()
        .map(|(start, end)| {
            let mut hist = vec![0u64; bins];
            f(start, end, &mut hist);
            hist
        })
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Sequential counterpart of the chunked histogram reduction.
#[cfg(not(feature = "parallel"))]
pub fn histogram_chunked<F>(n: u64, chunk: u64, bins: usize, f: F) -> Vec<u64>
where
    F: Fn(u64, u64, &mut [u64]) + Sync + Send,
{
    let mut hist = vec![0u64; bins];
    for (start, end) in chunk_ranges(n, chunk) {
        f(start, end, &mut hist);
    }
    hist
}

/// The half-open chunk boundaries used by [`histogram_chunked`]. Fixed by
/// `n` and `chunk` alone so both execution modes visit identical ranges.
fn chunk_ranges(n: u64, chunk: u64) -> Vec<(u64, u64)> {
    assert!(chunk > 0, "chunk size must be positive");
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        out.push((start, end));
        start = end;
    }
    out
}

/// Default chunk size for point enumerations: large enough to amortize task
/// overhead, small enough to keep many tasks in flight.
pub const DEFAULT_CHUNK: u64 = 1 << 14;
