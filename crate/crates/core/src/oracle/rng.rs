//! Seeded randomness for the generators.
//!
//! The stream is SplitMix64 with the 64-bit seed as initial state
//! (`x += 0x9e3779b97f4a7c15`, then the usual xor-shift-multiply finalizer).
//! Every derived draw below is a plain modulo reduction of one `next_u64`
//! call, so a generator can be reimplemented in any language from this file.

use rand_core::{RngCore, SeedableRng};
pub use rand_xoshiro::SplitMix64;

pub fn seeded(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Uniform-ish integer in `0..n` as `next_u64() % n`. `n` must be positive.
pub fn below(rng: &mut SplitMix64, n: u64) -> u64 {
    rng.next_u64() % n
}

/// Integer in `lo..=hi`.
pub fn between(rng: &mut SplitMix64, lo: u64, hi: u64) -> u64 {
    lo + below(rng, hi - lo + 1)
}

pub fn index(rng: &mut SplitMix64, n: usize) -> usize {
    below(rng, n as u64) as usize
}

/// True with probability `per_mille / 1000`.
pub fn chance(rng: &mut SplitMix64, per_mille: u32) -> bool {
    below(rng, 1000) < per_mille as u64
}

/// Fisher-Yates from the back: for `i = len-1 .. 1`, swap `i` with `below(i + 1)`.
pub fn shuffle<T>(rng: &mut SplitMix64, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = index(rng, i + 1);
        items.swap(i, j);
    }
}

/// `k` distinct values from `0..n`, in draw order.
pub fn sample(rng: &mut SplitMix64, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    shuffle(rng, &mut all);
    all.truncate(k);
    all
}
