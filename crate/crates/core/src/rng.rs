//! Counter-based random streams.
//!
//! Every random decision in the process is a pure function of
//! `(rng_seed, tags..., counter)`. Work can be split across any number of
//! threads and the output does not change.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Phase tags used to derive independent substreams.
pub mod tag {
    pub const SEED_GRAPH: u64 = 0x5345_4544_0001;
    pub const SEED_CLEAN: u64 = 0x5345_4544_0002;
    pub const SEED_OPEN: u64 = 0x5345_4544_0003; // "O0"
    pub const SAMPLE: u64 = 0x4e49_4242_0001;
    pub const CLEAN: u64 = 0x4e49_4242_0002;
    pub const REGULARIZE: u64 = 0x4e49_4242_0003;
    pub const MONTE_CARLO: u64 = 0x4d43_0001;
    pub const MONITOR: u64 = 0x4d4f_4e00_0001;
    pub const INDEPENDENCE: u64 = 0x494e_4400_0001;
}

/// A key naming one substream. Keys are derived hierarchically:
/// `StreamKey::root(seed).child(tag).child(step)...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        StreamKey(fmix64(seed ^ 0x7466_6e5f_726f_6f74))
    }

    pub fn child(self, label: u64) -> Self {
        StreamKey(fmix64(self.0.rotate_left(17) ^ fmix64(label.wrapping_add(GOLDEN))))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// The `counter`-th 64-bit word of this stream.
    #[inline]
    pub fn word(self, counter: u64) -> u64 {
        fmix64(fmix64(counter.wrapping_mul(GOLDEN) ^ self.0) ^ self.0.rotate_left(32))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(self, counter: u64) -> f64 {
        (self.word(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A sequential generator positioned at counter 0 of this stream.
    pub fn stream(self) -> CounterRng {
        CounterRng { key: self, counter: 0 }
    }

    /// A ChaCha generator seeded from this key, for long sequential draws
    /// (shuffles, local search).
    pub fn chacha(self) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        for (i, chunk) in seed.chunks_mut(8).enumerate() {
            chunk.copy_from_slice(&self.word(i as u64).to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// Sequential view of a [`StreamKey`]; `RngCore` so the `rand` adaptors work.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: StreamKey,
    counter: u64,
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let w = self.key.word(self.counter);
        self.counter += 1;
        w
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let w = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&w[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn words_are_pure_functions_of_key_and_counter() {
        let k = StreamKey::root(42).child(tag::SAMPLE).child(3);
        assert_eq!(k.word(17), k.word(17));
        assert_ne!(k.word(17), k.word(18));
        assert_ne!(k.word(17), StreamKey::root(43).child(tag::SAMPLE).child(3).word(17));
    }

    #[test]
    fn sequential_stream_matches_random_access() {
        let k = StreamKey::root(7).child(1);
        let mut s = k.stream();
        for c in 0..100 {
            assert_eq!(s.next_u64(), k.word(c));
        }
    }

    #[test]
    fn uniform_mean_and_bit_balance() {
        let k = StreamKey::root(1);
        let m = 200_000;
        let mean: f64 = (0..m).map(|c| k.uniform(c)).sum::<f64>() / m as f64;
        // sd of the mean is 1/sqrt(12 m) ~ 6.5e-4
        assert!((mean - 0.5).abs() < 4e-3, "mean {mean}");
        let ones: u32 = (0..10_000).map(|c| k.word(c).count_ones()).sum();
        let frac = ones as f64 / (64.0 * 10_000.0);
        assert!((frac - 0.5).abs() < 0.005);
    }

    #[test]
    fn child_streams_are_uncorrelated() {
        let a = StreamKey::root(5).child(1);
        let b = StreamKey::root(5).child(2);
        let m = 100_000;
        let cov: f64 = (0..m)
            .map(|c| (a.uniform(c) - 0.5) * (b.uniform(c) - 0.5))
            .sum::<f64>()
            / m as f64;
        // sd ~ (1/12)/sqrt(m) ~ 2.6e-4
        assert!(cov.abs() < 2e-3, "cov {cov}");
    }

    #[test]
    fn rand_adaptors_work() {
        let mut r = StreamKey::root(9).stream();
        let x: f64 = r.gen();
        assert!((0.0..1.0).contains(&x));
        let y = r.gen_range(0..10u32);
        assert!(y < 10);
    }
}
