//! Replicate loops.
//!
//! Replicates are seed-parallel: replicate `i` reads only its own field, so
//! the map is embarrassingly parallel and the output order is the index order
//! whichever backend runs it. Results are therefore identical with and
//! without the `parallel` feature.

use crate::error::Result;

/// Run `f(0..count)` on the default backend.
pub fn replicate_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        replicate_map_parallel(count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        replicate_map_sequential(count, f)
    }
}

/// Like [`replicate_map`], stopping at the first error in index order.
pub fn try_replicate_map<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    replicate_map(count, f).into_iter().collect()
}

pub fn replicate_map_sequential<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn replicate_map_parallel<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}
