//! Data-parallel map helpers.
//!
//! Everything embarrassingly parallel in this crate (gap-scan grid points,
//! measurement shots, Monte-Carlo trials, corpus cases) funnels through
//! [`map_indexed`]. With the `parallel` feature (default) it dispatches to
//! rayon; without it the build falls back to a plain sequential loop with
//! identical results. [`map_indexed_seq`] is always sequential so the bench
//! suite can compare both paths in one run.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, in parallel when the `parallel` feature is enabled.
///
/// `f` must be deterministic in its index argument; results are returned in
/// index order regardless of scheduling.
#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n` sequentially (the `parallel` feature is disabled).
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    map_indexed_seq(n, f)
}

/// Sequential reference path, available regardless of features.
pub fn map_indexed_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}
