//! Data-parallel sweep helpers.
//!
//! With the `parallel` feature (default) the indexed forms run on rayon;
//! without it they fall back to the sequential twins, which are always
//! available so benchmarks can compare both paths in one build. Reductions
//! are associative with index tie-breaks, so results are identical either
//! way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f` over `0..n`, preserving index order.
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
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
        map_collect_seq(n, f)
    }
}

/// Sequential twin of [`map_collect`].
pub fn map_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Index and value of the maximum of `f` over `0..n`; ties resolve to the
/// lowest index. `None` when `n == 0`. Values must be finite.
pub fn argmax_by<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(|i| (i, f(i)))
            .reduce_with(pick_max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        argmax_by_seq(n, f)
    }
}

/// Sequential twin of [`argmax_by`].
pub fn argmax_by_seq<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64,
{
    (0..n).map(|i| (i, f(i))).reduce(pick_max)
}

fn pick_max(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

/// Number of unordered pairs of `n` items.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// The `idx`-th pair (i, j) with i < j, enumerated row by row.
pub fn pair_at(n: usize, idx: usize) -> (usize, usize) {
    debug_assert!(idx < pair_count(n));
    let mut i = 0usize;
    let mut base = 0usize;
    loop {
        let row = n - 1 - i;
        if idx < base + row {
            return (i, i + 1 + (idx - base));
        }
        base += row;
        i += 1;
    }
}
