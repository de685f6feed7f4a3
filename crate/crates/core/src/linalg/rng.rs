//! Seeded random source.
//!
//! The generator is ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), a
//! counter-based stream cipher whose output is fixed by the ChaCha
//! specification and therefore identical on every platform. A `u64` seed is
//! expanded to the 256-bit ChaCha key with `SeedableRng::seed_from_u64`
//! (a PCG32 stream with multiplier `6364136223846793005` and increment
//! `11634580027462260723`).
//!
//! Uniform reals are built from the top 53 (or 24) bits of one `u64` draw, so
//! the sequence of reals is a pure function of the seed and does not depend on
//! `rand`'s distribution internals.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

/// Name recorded in run metadata so results can be cross-checked.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), seed_from_u64 key expansion";

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Child generator whose seed mixes `seed` with a label and an integer.
    ///
    /// Independent experiment cells use this so the result of a cell does not
    /// depend on how many other cells ran before it.
    pub fn derived(seed: u64, label: &str, index: u64) -> Self {
        Self::new(derive_seed(seed, label, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[0, 1)` in the working precision.
    pub fn uniform<T: Real>(&mut self) -> T {
        let u = self.uniform_f64();
        let v = T::lit(u);
        // Rounding to f32 can land on 1.0.
        if v >= T::one() {
            T::one() - T::epsilon()
        } else {
            v
        }
    }

    /// Uniform draw in `[lo, hi]` (the upper end is reachable only through rounding).
    pub fn uniform_in<T: Real>(&mut self, lo: T, hi: T) -> T {
        lo + (hi - lo) * self.uniform::<T>()
    }

    /// Uniform integer in `[0, n)`, unbiased (Lemire's multiply-shift with rejection).
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }
}

/// Mixes a base seed with a label and index through FNV-1a followed by the
/// SplitMix64 finalizer.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes().chain(index.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(seed ^ splitmix64(h))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        let xs: Vec<u64> = (0..32).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..32).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(Rng::new(8).next_u64(), xs[0]);
    }

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut r = Rng::new(1);
        for _ in 0..10_000 {
            let u: f64 = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let v: f32 = r.uniform();
            assert!((0.0..1.0).contains(&v));
        }
    }

    #[test]
    fn index_covers_range() {
        let mut r = Rng::new(3);
        let mut seen = [0usize; 5];
        for _ in 0..5_000 {
            seen[r.index(5)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800));
    }

    #[test]
    fn derived_seeds_separate_labels() {
        assert_ne!(derive_seed(1, "ordered", 64), derive_seed(1, "normal", 64));
        assert_ne!(derive_seed(1, "ordered", 64), derive_seed(1, "ordered", 128));
        assert_eq!(derive_seed(1, "ordered", 64), derive_seed(1, "ordered", 64));
    }

    // Frozen first draws: a change here means stored run results are no longer replayable.
    #[test]
    fn stream_is_pinned() {
        let mut r = Rng::new(0);
        assert_eq!(r.next_u64(), 0xb585_f767_a79a_3b6c);
        assert_eq!(derive_seed(7, "ordered", 64), 0xd77b_6fd2_ea44_1852);
    }
}
