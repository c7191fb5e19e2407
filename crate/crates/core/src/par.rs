//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) these run on the rayon global
//! pool; without it they fall back to plain sequential iterators. Every helper
//! returns the same value either way: results are collected in input order and
//! searches report the first match in input order.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// True when the crate was built with the `parallel` feature.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Maps `f` over a slice, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}

/// Maps `f` over an index range, preserving order.
pub fn map_range<R, F>(range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return range.into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return range.map(f).collect();
}

/// Returns the first `Some` produced by `f`, in input order.
pub fn find_map_first<T, R, F>(items: &[T], f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().find_map_first(f);
    #[cfg(not(feature = "parallel"))]
    return items.iter().find_map(f);
}

/// Maximum of `f` over an index range, or `None` for an empty range.
pub fn max_range<R, F>(range: Range<usize>, f: F) -> Option<R>
where
    R: Ord + Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return range.into_par_iter().map(f).max();
    #[cfg(not(feature = "parallel"))]
    return range.map(f).max();
}

/// True when `f` holds for every item.
pub fn all<T, F>(items: &[T], f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().all(f);
    #[cfg(not(feature = "parallel"))]
    return items.iter().all(f);
}
