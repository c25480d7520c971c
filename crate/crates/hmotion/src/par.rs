//! Data-parallel helpers with a sequential fallback.
//!
//! Every value-producing parallel loop in the crate goes through
//! [`map_indexed`], which preserves index order, so results (and hence
//! reports) are bitwise identical whether the `parallel` feature is on, off,
//! or running on any number of threads.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

/// Deterministic sum of a parallel map: the terms are materialized in index
/// order and reduced sequentially.
pub(crate) fn sum_indexed<F>(len: usize, f: F) -> crate::C64
where
    F: Fn(usize) -> crate::C64 + Sync + Send,
{
    map_indexed(len, f).into_iter().sum()
}
