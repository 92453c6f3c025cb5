//! Fixed-structure pairwise reduction.
//!
//! Every sum over an index range is computed by splitting the range at its
//! midpoint recursively, down to short leaves that are summed left to right.
//! The split points depend only on the range, never on the thread count, so
//! [`pairwise_sum`] returns the same bits with and without the `parallel`
//! feature, on any number of rayon workers. Pairwise grouping also keeps the
//! rounding error at O(log n) ulps instead of the O(n) of a running sum.

/// Ranges at or below this length are summed with a plain loop.
const LEAF: usize = 256;

/// Ranges shorter than this are not worth a rayon task split.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 16 * 1024;

/// Sum of `f(0) + f(1) + ... + f(n-1)` with a fixed reduction tree.
///
/// Parallelized over rayon when the `parallel` feature is on and the range
/// is large; the result is bit-identical to [`pairwise_sum_seq`].
pub fn pairwise_sum<F>(n: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    par_range(0, n, f)
}

/// Strictly sequential sum with the identical reduction tree.
///
/// This is the fallback path when the `parallel` feature is off, and the
/// baseline the benchmark suite compares against.
pub fn pairwise_sum_seq<F>(n: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64,
{
    seq_range(0, n, f)
}

fn par_range<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n = hi - lo;
    if n <= LEAF {
        return leaf(lo, hi, f);
    }
    let mid = lo + n / 2;
    #[cfg(feature = "parallel")]
    if n >= PAR_THRESHOLD {
        let (a, b) = rayon::join(|| par_range(lo, mid, f), || par_range(mid, hi, f));
        return a + b;
    }
    par_range(lo, mid, f) + par_range(mid, hi, f)
}

fn seq_range<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64,
{
    let n = hi - lo;
    if n <= LEAF {
        return leaf(lo, hi, f);
    }
    let mid = lo + n / 2;
    seq_range(lo, mid, f) + seq_range(mid, hi, f)
}

#[inline]
fn leaf<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    let mut acc = 0.0;
    for i in lo..hi {
        acc += f(i);
    }
    acc
}
