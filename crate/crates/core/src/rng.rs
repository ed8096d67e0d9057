//! Counter-based randomness.
//!
//! Every random choice tied to a fixed object (an edge, a vertex, a trial)
//! is a pure function of `(seed, stream, index)`. Samples at different
//! parameters that share a stream are therefore monotonically coupled, and
//! results do not depend on iteration order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Well-known stream ids. Trial-indexed streams are offset from these.
pub mod streams {
    pub const BOND: u64 = 0x0b0d;
    pub const SITE: u64 = 0x5173;
    pub const TRIM_BETA: u64 = 0x7000_0000;
    pub const HOROCYCLE: u64 = 0x4040;
    pub const STRETCH: u64 = 0x57e7;
    pub const GALTON_WATSON: u64 = 0x6a17;
    pub const WALK: u64 = 0x3a1c_0000;
    pub const FOREST: u64 = 0xf0e5_0000;
    pub const ENTROPY: u64 = 0xe471;
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A 64-bit hash of `(seed, stream, index)`.
#[inline]
pub fn hash3(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ stream.rotate_left(17)) ^ index.rotate_left(41))
}

/// Uniform in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn uniform(seed: u64, stream: u64, index: u64) -> f64 {
    (hash3(seed, stream, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Bernoulli(p) as a threshold on the counter-based uniform.
#[inline]
pub fn coin(seed: u64, stream: u64, index: u64, p: f64) -> bool {
    uniform(seed, stream, index) < p
}

/// A sequential generator for processes whose draws are inherently ordered
/// (walks, Wilson's algorithm). Distinct `(stream, trial)` pairs give
/// independent generators.
pub fn stream_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(hash3(seed, stream, trial));
    rng.set_stream(stream ^ trial.rotate_left(32));
    rng
}

/// Maps `f` over `0..n` and returns results in index order, in parallel when
/// the `parallel` feature is on.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
