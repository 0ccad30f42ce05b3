//! Worker pool setup, seeded block streams and the parallel executors.
//!
//! Monte Carlo work is cut into fixed blocks of [`BLOCK`] samples. Block `b`
//! of a run draws from its own ChaCha8 stream derived from
//! `(seed, domain tag, b)`, and block results are merged in index order by
//! pairwise halving, so every estimate is a function of `(seed, n)` alone.

use bergman_core::spectrum::{self, SlabExecutor};
use bergman_core::{Complex64, QuadConfig, SpectrumTable, SymbolSpec, WeightParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::stats::{merge_pairwise, Merge};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BERGMAN_SPECTRA_THREADS";

/// Samples per block.
pub const BLOCK: u64 = 1 << 14;

/// Sizes the global rayon pool from [`THREADS_ENV`] if set. Returns the
/// thread count in effect. Calling it again after the pool exists is harmless.
pub fn init_threads() -> Result<usize, String> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{v}'"))?;
        // Fails only if the pool was already built; the existing pool is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}

/// The generator for block `block` of the stream `(seed, tag)`.
pub fn block_rng(seed: u64, tag: u64, block: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(block);
    rng
}

/// Runs `work(rng, count)` on every block of an `n`-sample run in parallel
/// and merges the block accumulators in order.
pub fn run_blocks<A, F>(n: u64, seed: u64, tag: u64, work: F) -> Option<A>
where
    A: Merge + Clone + Send,
    F: Fn(&mut ChaCha8Rng, u64) -> A + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let parts: Vec<A> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK.min(n - b * BLOCK);
            work(&mut block_rng(seed, tag, b), count)
        })
        .collect();
    merge_pairwise(&parts)
}

/// Distributes quadrature slabs over the rayon pool. `collect` keeps slab
/// order, so results are bit-identical to [`spectrum::Sequential`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl SlabExecutor for Rayon {
    fn map_slabs(
        &self,
        slabs: usize,
        work: &(dyn Fn(usize) -> bergman_core::Result<Vec<Complex64>> + Sync),
    ) -> bergman_core::Result<Vec<Vec<Complex64>>> {
        (0..slabs).into_par_iter().map(work).collect()
    }
}

/// [`spectrum::spectrum`] on the worker pool.
pub fn spectrum(
    symbol: &SymbolSpec,
    p: WeightParams,
    max_degree: u32,
    q: &QuadConfig,
) -> bergman_core::Result<SpectrumTable> {
    spectrum::spectrum_with(symbol, p, max_degree, q, &Rayon)
}
