//! Randomness plumbing: every sample owns a ChaCha8 stream keyed by the
//! master seed and selected by a 64-bit stream id mixed from an experiment
//! tag and a sample index. Streams are independent of evaluation order, so
//! results do not depend on how work is split across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Experiment tags used to separate families of substreams.
pub mod tags {
    pub const WIGNER: u64 = 0x5749_474e;
    /// Component `c` of a monoparametric tuple uses `MATRIX_COMPONENT + c`.
    pub const MATRIX_COMPONENT: u64 = 0x4d41_5400;
    pub const PARAM: u64 = 0x5041_5241;
    pub const THEORY_MC: u64 = 0x5448_4d43;
}

/// Identifies one substream below a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub tag: u64,
    pub index: u64,
}

impl StreamId {
    pub const fn new(tag: u64, index: u64) -> Self {
        Self { tag, index }
    }

    /// Sub-index within this stream, e.g. the `j`-th parameter draw of pair `i`.
    pub fn child(self, j: u64) -> Self {
        Self { tag: self.tag, index: mix64(self.index, j, 0x6368_696c_64) }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive avalanche mix of three words.
pub fn mix64(a: u64, b: u64, c: u64) -> u64 {
    splitmix(splitmix(splitmix(a) ^ b) ^ c)
}

/// The generator for one substream.
pub fn substream(seed: u64, id: StreamId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix64(seed, id.tag, id.index));
    rng
}

/// Uniform on `(0, 1]` with 53 random bits.
pub fn uniform_open0(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on `[0, 1)` with 53 random bits.
pub fn uniform01(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal variates by the trigonometric Box–Muller transform. Both
/// outputs of a transform are used; no rejection step, so the number of
/// underlying words consumed per variate is fixed.
#[derive(Debug, Clone)]
pub struct Normals<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> Normals<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = uniform_open0(&mut self.rng);
        let u2 = uniform01(&mut self.rng);
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn rng_mut(&mut self) -> &mut R {
        &mut self.rng
    }
}
