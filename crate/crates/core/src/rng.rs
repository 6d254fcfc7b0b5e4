//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha` 0.9, whose output is
//! stable across patch releases) seeded from a 64-bit value. Child streams are
//! derived from the parent's *seed* and an index through a SplitMix64
//! finalizer, so a child never depends on how many draws the parent made.
//! This is what lets independent runs execute on any number of threads and
//! still reproduce bit-for-bit.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Seed of the `index`-th child.
    pub fn child_seed(&self, index: u64) -> u64 {
        splitmix64(splitmix64(self.seed) ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
    }

    /// Independent stream number `index`, derived from this stream's seed.
    pub fn child(&self, index: u64) -> RngStream {
        RngStream::new(self.child_seed(index))
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
