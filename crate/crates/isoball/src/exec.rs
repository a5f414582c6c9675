//! Deterministic execution helpers.
//!
//! With the `parallel` feature the maps run on rayon; without it they run
//! sequentially. Either way the output is bit-identical: maps preserve input
//! order, and floating-point reductions sum fixed-size chunk partials in
//! order, so the result never depends on thread count or scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map a slice to a vector, preserving order.
pub fn map_ordered<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
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

/// Map an index range to a vector, preserving order.
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Chunk partial-sum size for deterministic f64 reductions.
pub const SUM_CHUNK: usize = 4096;

/// Sum `f(i)` for i in 0..len with a thread-count-independent result.
///
/// Partials are computed over fixed chunks of `SUM_CHUNK` indices and then
/// added in chunk order.
pub fn sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let n_chunks = len.div_ceil(SUM_CHUNK);
    let partials = map_range(n_chunks, |c| {
        let lo = c * SUM_CHUNK;
        let hi = (lo + SUM_CHUNK).min(len);
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    });
    partials.into_iter().sum()
}

/// Sum integer counts for i in 0..len (order-free, exact).
pub fn count_indexed<F>(len: usize, f: F) -> u64
where
    F: Fn(usize) -> u64 + Sync + Send,
{
    let n_chunks = len.div_ceil(SUM_CHUNK);
    let partials = map_range(n_chunks, |c| {
        let lo = c * SUM_CHUNK;
        let hi = (lo + SUM_CHUNK).min(len);
        let mut acc = 0u64;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    });
    partials.into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_map_preserves_order() {
        let xs: Vec<u64> = (0..10_000).collect();
        let ys = map_ordered(&xs, |&x| x * 2);
        assert!(ys.iter().enumerate().all(|(i, &y)| y == 2 * i as u64));
    }

    #[test]
    fn chunked_sum_matches_sequential() {
        let len = 3 * SUM_CHUNK + 17;
        let par = sum_indexed(len, |i| (i as f64).sqrt());
        let mut seq_chunks = 0.0;
        let mut c = 0;
        while c < len {
            let hi = (c + SUM_CHUNK).min(len);
            let mut acc = 0.0;
            for i in c..hi {
                acc += (i as f64).sqrt();
            }
            seq_chunks += acc;
            c = hi;
        }
        assert_eq!(par, seq_chunks);
    }
}
