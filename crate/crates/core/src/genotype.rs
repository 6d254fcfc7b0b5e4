//! Fixed-length bit strings and the fixed-point real codec used by the
//! real-encoded algorithms.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Longest supported genotype.
pub const MAX_BITS: u32 = 64;

/// A bit string of fixed length `1..=64`. Bit 0 is the least significant bit
/// of [`BitGenotype::bits`]. Unused high bits are always zero, so equality is
/// bitwise equality of the string.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitGenotype {
    bits: u64,
    len: u8,
}

#[inline]
fn mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl BitGenotype {
    pub fn new(bits: u64, len: u32) -> Result<Self> {
        if len == 0 || len > MAX_BITS {
            return Err(Error::param(format!(
                "genotype length must be in 1..={MAX_BITS}, got {len}"
            )));
        }
        if bits & !mask(len) != 0 {
            return Err(Error::param(format!(
                "bit pattern {bits:#x} does not fit in {len} bits"
            )));
        }
        Ok(Self {
            bits,
            len: len as u8,
        })
    }

    /// Builds a genotype, silently dropping bits above `len`.
    ///
    /// # Panics
    /// If `len` is outside `1..=64`.
    #[inline]
    pub fn truncated(bits: u64, len: u32) -> Self {
        assert!((1..=MAX_BITS).contains(&len), "genotype length {len} out of range");
        Self {
            bits: bits & mask(len),
            len: len as u8,
        }
    }

    pub fn zeros(len: u32) -> Self {
        Self::truncated(0, len)
    }

    pub fn ones(len: u32) -> Self {
        Self::truncated(u64::MAX, len)
    }

    /// Uniformly random genotype of the given length.
    #[inline]
    pub fn random<R: Rng + ?Sized>(len: u32, rng: &mut R) -> Self {
        Self::truncated(rng.next_u64(), len)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        self.len as u32
    }

    #[inline]
    pub fn bit(&self, i: u32) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn flipped(self, i: u32) -> Self {
        debug_assert!(i < self.len());
        Self {
            bits: self.bits ^ (1u64 << i),
            len: self.len,
        }
    }

    #[inline]
    pub fn xor_mask(self, m: u64) -> Self {
        Self {
            bits: (self.bits ^ m) & mask(self.len()),
            len: self.len,
        }
    }

    pub fn complement(self) -> Self {
        self.xor_mask(u64::MAX)
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn hamming(&self, other: &Self) -> u32 {
        debug_assert_eq!(self.len, other.len);
        (self.bits ^ other.bits).count_ones()
    }

    /// Number of points in the space of genotypes of this length, saturating
    /// at `u64::MAX` for 64-bit genotypes.
    pub fn space_size(len: u32) -> u64 {
        if len >= 64 {
            u64::MAX
        } else {
            1u64 << len
        }
    }
}

impl fmt::Debug for BitGenotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitGenotype({:0width$b})", self.bits, width = self.len() as usize)
    }
}

impl fmt::Display for BitGenotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.len() as usize)
    }
}

/// Decodes `g` as the fixed-point value `u / (2^L - 1)` in `[0, 1]`, where
/// `u` is the unsigned integer of the bit string.
#[inline]
pub fn decode_unit_interval(g: &BitGenotype) -> f64 {
    g.bits() as f64 / mask(g.len()) as f64
}

/// Nearest fixed-point pattern of length `len` for `x`, with `x` clamped to
/// `[0, 1]`. Inverse of [`decode_unit_interval`] on representable values.
#[inline]
pub fn encode_unit_interval(x: f64, len: u32) -> BitGenotype {
    let x = if x.is_nan() { 0.0 } else { x.clamp(0.0, 1.0) };
    let scale = mask(len) as f64;
    let u = (x * scale).round();
    // `as` saturates, which matters only for len = 64 where scale rounds up.
    BitGenotype::truncated(u as u64, len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_checks_width() {
        assert!(BitGenotype::new(0b1111, 4).is_ok());
        assert!(BitGenotype::new(0b10000, 4).is_err());
        assert!(BitGenotype::new(0, 0).is_err());
        assert!(BitGenotype::new(0, 65).is_err());
    }

    #[test]
    fn decode_fixed_points() {
        assert_eq!(decode_unit_interval(&BitGenotype::zeros(32)), 0.0);
        assert_eq!(decode_unit_interval(&BitGenotype::ones(32)), 1.0);
        let g = BitGenotype::new((1u64 << 32) - 2, 32).unwrap();
        let expected = ((1u64 << 32) - 2) as f64 / ((1u64 << 32) - 1) as f64;
        assert_eq!(decode_unit_interval(&g), expected);
    }

    #[test]
    fn encode_clamps() {
        assert_eq!(encode_unit_interval(1.3, 32), BitGenotype::ones(32));
        assert_eq!(encode_unit_interval(-0.2, 32), BitGenotype::zeros(32));
    }

    #[test]
    fn complement_stays_in_width() {
        let g = BitGenotype::new(0xA5A5, 16).unwrap();
        assert_eq!(g.complement().bits(), 0x5A5A);
    }

    proptest! {
        #[test]
        fn decode_is_order_preserving(a in any::<u32>(), b in any::<u32>()) {
            let ga = BitGenotype::new(a as u64, 32).unwrap();
            let gb = BitGenotype::new(b as u64, 32).unwrap();
            let (da, db) = (decode_unit_interval(&ga), decode_unit_interval(&gb));
            prop_assert_eq!(a.cmp(&b), da.partial_cmp(&db).unwrap());
        }

        #[test]
        fn encode_inverts_decode(u in any::<u32>()) {
            let g = BitGenotype::new(u as u64, 32).unwrap();
            prop_assert_eq!(encode_unit_interval(decode_unit_interval(&g), 32), g);
        }
    }
}
