//! Seeded random streams and the fixed samplers built on them.
//!
//! Every random matrix in the crate is produced column block by column block.
//! Block `b` of a matrix seeded with `seed` draws from ChaCha20 keyed by
//! `seed` on stream `2b` (projection / generic use) or `2b + 1` (additive
//! noise), so two matrices seeded identically still never share a stream and
//! parallel generation reproduces sequential output bit for bit.
//!
//! Normal deviates use the Box–Muller transform (cosine branch only, one
//! deviate per pair of uniforms). Uniforms take the top 53 bits of a `u64`.
//! These choices are part of the on-disk reproducibility contract and must
//! not change without bumping the file format version.

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// Columns per independently seeded block.
pub const BLOCK_COLUMNS: usize = 8;

/// Which half of a seed's stream space a matrix draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamKind {
    Projection,
    Noise,
}

/// A ChaCha20 stream with the crate's fixed samplers on top.
pub struct Stream {
    rng: ChaCha20Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Stream for column block `block` of a matrix seeded with `seed`.
    pub fn for_block(seed: u64, kind: StreamKind, block: usize) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let lane = match kind {
            StreamKind::Projection => 0,
            StreamKind::Noise => 1,
        };
        rng.set_stream(2 * block as u64 + lane);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    /// Uniform integer in `0..bound` (rejection sampling, no modulo bias).
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }

    /// Standard normal deviate.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    /// Laplace(0, scale) deviate by inversion.
    pub fn laplace(&mut self, scale: f64) -> f64 {
        let u = self.uniform_open() - 0.5;
        -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
    }
}

/// Child seed for a labelled sub-task of a seeded run (SplitMix64 finalizer
/// over the master seed and each tag in turn).
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = master;
    for &t in tags {
        state = splitmix(state ^ splitmix(t.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    splitmix(state)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Number of column blocks covering `cols` columns.
pub fn block_count(cols: usize) -> usize {
    cols.div_ceil(BLOCK_COLUMNS)
}

/// Column range of block `b`.
pub fn block_range(cols: usize, b: usize) -> std::ops::Range<usize> {
    let start = b * BLOCK_COLUMNS;
    start..(start + BLOCK_COLUMNS).min(cols)
}
