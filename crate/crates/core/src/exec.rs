//! Sequential/parallel execution of chunked workloads.

use serde::Serialize;

/// How sample loops are executed. Both modes produce identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing; falls back to sequential without the `parallel`
    /// feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Samples per chunk; each chunk owns one RNG stream.
pub const CHUNK: usize = 1024;

/// Splits `n` items into `[start, end)` ranges of at most [`CHUNK`].
pub fn chunk_ranges(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(n)))
        .collect()
}

/// Maps `f` over chunk indices, preserving order.
pub fn map_chunks<T, F>(n_chunks: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n_chunks).into_par_iter().map(f).collect()
        }
        _ => (0..n_chunks).map(f).collect(),
    }
}
