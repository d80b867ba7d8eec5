//! Execution mode and the thin layer over rayon.
//!
//! Without the `parallel` feature the chunked path runs on the calling
//! thread. Chunk seeds come from the master stream, so for a fixed chunk
//! count the result does not depend on the number of threads.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ExecMode {
    /// One RNG stream over the whole ensemble. The acceptance contract.
    #[default]
    Deterministic,
    /// Shuffle, split into `chunks` groups, collide within each group on
    /// its own stream.
    Parallel { chunks: usize },
}

impl ExecMode {
    pub fn parallel_default() -> Self {
        ExecMode::Parallel { chunks: 64 }
    }
}

/// Applies `f` to each chunk together with its seed and collects results
/// in chunk order.
pub(crate) fn map_chunks<T, F>(data: &mut [f64], chunk_len: usize, seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut [f64], u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk_len).zip(seeds.par_iter()).map(|(c, &s)| f(c, s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk_len).zip(seeds.iter()).map(|(c, &s)| f(c, s)).collect()
    }
}

pub(crate) fn for_each_mut<F>(data: &mut [f64], f: F)
where
    F: Fn(&mut f64) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        data.par_iter_mut().for_each(f);
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.iter_mut().for_each(f);
    }
}
