//! Replication runner: maps a closure over replication indices, in parallel
//! when the `parallel` feature is enabled (the default) and sequentially
//! otherwise.
//!
//! Results are collected *in index order* regardless of scheduling, and each
//! replication derives all of its randomness from its own index, so the
//! parallel and sequential runners are bit-for-bit interchangeable. The
//! sequential runner stays compiled under both configurations: it is the
//! reference the parallel path is benchmarked and tested against.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `reps` independent replications of `task(index)` and returns the
/// results ordered by index.
pub fn replicate<T, F>(reps: usize, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..reps).into_par_iter().map(task).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..reps).map(task).collect()
    }
}

/// Sequential reference implementation of [`replicate`].
pub fn replicate_seq<T, F>(reps: usize, task: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..reps).map(task).collect()
}
