//! The compared (1+1)-style algorithms: an encoding length, a mutation
//! operator and an acceptance rule plugged into [`crate::engine`].
//!
//! Presets:
//!
//! | name    | L  | mutation                 | acceptance |
//! |---------|----|--------------------------|------------|
//! | A1      | 32 | Gaussian, sigma = 0.001  | elitist    |
//! | A2      | 32 | Gaussian, sigma = 0.01   | elitist    |
//! | A3      | 32 | per-bit, p = 0.3         | elitist    |
//! | A4      | 32 | per-bit, p = 0.1         | elitist    |
//! | B1..B16 | 16 | k distinct flips, k=1..16| elitist    |

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::genotype::{decode_unit_interval, encode_unit_interval, BitGenotype, MAX_BITS};

/// Encoding length of the real-valued presets A1..A4.
pub const REAL_BITS: u32 = 32;
/// Encoding length of the table presets B1..B16.
pub const TABLE_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mutation {
    /// Decode to `[0, 1]`, add `N(0, sigma^2)`, clamp, re-encode.
    Gaussian { sigma: f64 },
    /// Flip every bit independently with probability `rate`.
    PerBit { rate: f64 },
    /// Flip exactly `k` distinct, uniformly chosen positions.
    KFlips { k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// Offspring survives iff it is no worse than the parent.
    Elitist,
    AcceptAll,
}

/// How the `B_k` presets interpret "k mutations per chromosome".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KFlipSemantics {
    /// Exactly `k` distinct positions (fixed Hamming distance).
    #[default]
    Shell,
    /// Each bit flips with probability `k / L`.
    PerBit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub name: String,
    pub encoding_length: u32,
    pub mutation: Mutation,
    pub acceptance: Acceptance,
}

impl AlgorithmSpec {
    pub fn new(
        name: impl Into<String>,
        encoding_length: u32,
        mutation: Mutation,
        acceptance: Acceptance,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            encoding_length,
            mutation,
            acceptance,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.encoding_length;
        if len == 0 || len > MAX_BITS {
            return Err(Error::param(format!("encoding length {len} out of range")));
        }
        match self.mutation {
            Mutation::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(Error::param(format!("gaussian sigma must be positive, got {sigma}")))
            }
            Mutation::PerBit { rate } if !(rate > 0.0 && rate <= 1.0) => {
                Err(Error::param(format!("per-bit rate must be in (0, 1], got {rate}")))
            }
            Mutation::KFlips { k } if k < 1 || k > len => {
                Err(Error::param(format!("k must be in 1..={len}, got {k}")))
            }
            _ => Ok(()),
        }
    }

    /// Named preset with shell semantics for `B_k`.
    pub fn preset(name: &str) -> Result<Self> {
        Self::preset_with(name, KFlipSemantics::Shell)
    }

    pub fn preset_with(name: &str, semantics: KFlipSemantics) -> Result<Self> {
        let unknown = || Error::UnknownAlgorithm(name.to_string());
        let (family, index) = name.split_at(name.len().min(1));
        let index: u32 = index.parse().map_err(|_| unknown())?;
        let elitist = Acceptance::Elitist;
        let (len, mutation) = match (family, index) {
            ("A", 1) => (REAL_BITS, Mutation::Gaussian { sigma: 0.001 }),
            ("A", 2) => (REAL_BITS, Mutation::Gaussian { sigma: 0.01 }),
            ("A", 3) => (REAL_BITS, Mutation::PerBit { rate: 0.3 }),
            ("A", 4) => (REAL_BITS, Mutation::PerBit { rate: 0.1 }),
            ("B", k @ 1..=16) => match semantics {
                KFlipSemantics::Shell => (TABLE_BITS, Mutation::KFlips { k }),
                KFlipSemantics::PerBit => (
                    TABLE_BITS,
                    Mutation::PerBit {
                        rate: k as f64 / TABLE_BITS as f64,
                    },
                ),
            },
            _ => return Err(unknown()),
        };
        Self::new(name, len, mutation, elitist)
    }

    /// All twenty preset names in canonical order.
    pub fn preset_names() -> Vec<String> {
        (1..=4)
            .map(|i| format!("A{i}"))
            .chain((1..=16).map(|k| format!("B{k}")))
            .collect()
    }

    /// `B1..B16`.
    pub fn table_presets(semantics: KFlipSemantics) -> Vec<Self> {
        (1..=16)
            .map(|k| Self::preset_with(&format!("B{k}"), semantics).expect("valid preset"))
            .collect()
    }

    #[inline]
    pub fn mutate<R: Rng + ?Sized>(&self, g: BitGenotype, rng: &mut R) -> BitGenotype {
        match self.mutation {
            Mutation::Gaussian { sigma } => mutate_gaussian(g, sigma, rng),
            Mutation::PerBit { rate } => mutate_per_bit(g, rate, rng),
            Mutation::KFlips { k } => mutate_k_flips(g, k, rng),
        }
    }

    #[inline]
    pub fn accepts(&self, parent_value: f64, offspring_value: f64) -> bool {
        match self.acceptance {
            Acceptance::Elitist => accept_elitist(parent_value, offspring_value),
            Acceptance::AcceptAll => true,
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Gaussian mutation in the fixed-point real encoding.
#[inline]
pub fn mutate_gaussian<R: Rng + ?Sized>(g: BitGenotype, sigma: f64, rng: &mut R) -> BitGenotype {
    let z: f64 = rng.sample(StandardNormal);
    gaussian_step(g, z * sigma)
}

/// Applies a fixed perturbation `delta` to the decoded value of `g`.
#[inline]
pub fn gaussian_step(g: BitGenotype, delta: f64) -> BitGenotype {
    let x = decode_unit_interval(&g);
    encode_unit_interval(x + delta, g.len())
}

#[inline]
pub fn mutate_per_bit<R: Rng + ?Sized>(g: BitGenotype, rate: f64, rng: &mut R) -> BitGenotype {
    let mut m = 0u64;
    for i in 0..g.len() {
        if rng.random_bool(rate) {
            m |= 1 << i;
        }
    }
    g.xor_mask(m)
}

#[inline]
pub fn mutate_k_flips<R: Rng + ?Sized>(g: BitGenotype, k: u32, rng: &mut R) -> BitGenotype {
    let len = g.len() as usize;
    debug_assert!(k >= 1 && k as usize <= len);
    let mut positions = [0u8; MAX_BITS as usize];
    for (i, p) in positions.iter_mut().enumerate() {
        *p = i as u8;
    }
    // A uniform k-subset is the complement of a uniform (len-k)-subset, so
    // draw whichever is smaller.
    let keep = len - k as usize;
    let draw = keep.min(k as usize);
    let (chosen, _) = positions[..len].partial_shuffle(rng, draw);
    let m = chosen.iter().fold(0u64, |m, &p| m | (1u64 << p));
    if draw == keep {
        g.complement().xor_mask(m)
    } else {
        g.xor_mask(m)
    }
}

/// Minimization with ties accepted.
#[inline]
pub fn accept_elitist(parent_value: f64, offspring_value: f64) -> bool {
    offspring_value <= parent_value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    #[test]
    fn presets_match_published_parameters() {
        let a1 = AlgorithmSpec::preset("A1").unwrap();
        assert_eq!(a1.encoding_length, 32);
        assert_eq!(a1.mutation, Mutation::Gaussian { sigma: 0.001 });
        assert_eq!(a1.acceptance, Acceptance::Elitist);
        assert_eq!(
            AlgorithmSpec::preset("A2").unwrap().mutation,
            Mutation::Gaussian { sigma: 0.01 }
        );
        assert_eq!(
            AlgorithmSpec::preset("A3").unwrap().mutation,
            Mutation::PerBit { rate: 0.3 }
        );
        assert_eq!(
            AlgorithmSpec::preset("A4").unwrap().mutation,
            Mutation::PerBit { rate: 0.1 }
        );
        for k in 1..=16 {
            let b = AlgorithmSpec::preset(&format!("B{k}")).unwrap();
            assert_eq!(b.encoding_length, 16);
            assert_eq!(b.mutation, Mutation::KFlips { k });
            assert_eq!(b.acceptance, Acceptance::Elitist);
            assert_eq!(b.name, format!("B{k}"));
        }
        assert_eq!(AlgorithmSpec::preset_names().len(), 20);
    }

    #[test]
    fn per_bit_semantics_switch() {
        let b4 = AlgorithmSpec::preset_with("B4", KFlipSemantics::PerBit).unwrap();
        assert_eq!(b4.mutation, Mutation::PerBit { rate: 0.25 });
    }

    #[test]
    fn unknown_presets_rejected() {
        for bad in ["", "A", "A0", "A5", "B0", "B17", "C1", "b1", "B1x"] {
            assert!(
                matches!(AlgorithmSpec::preset(bad), Err(Error::UnknownAlgorithm(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn invalid_custom_specs_rejected() {
        let e = Acceptance::Elitist;
        assert!(AlgorithmSpec::new("g", 32, Mutation::Gaussian { sigma: 0.0 }, e).is_err());
        assert!(AlgorithmSpec::new("p", 32, Mutation::PerBit { rate: 1.5 }, e).is_err());
        assert!(AlgorithmSpec::new("k", 16, Mutation::KFlips { k: 17 }, e).is_err());
        assert!(AlgorithmSpec::new("k", 16, Mutation::KFlips { k: 0 }, e).is_err());
        assert!(AlgorithmSpec::new("k", 16, Mutation::KFlips { k: 16 }, e).is_ok());
    }

    #[test]
    fn gaussian_zero_and_clamp() {
        let half = encode_unit_interval(0.5, 32);
        assert_eq!(gaussian_step(half, 0.0), half);
        let one = BitGenotype::ones(32);
        assert_eq!(gaussian_step(one, 0.3), one);
        assert_eq!(gaussian_step(BitGenotype::zeros(32), -0.3), BitGenotype::zeros(32));
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = RngStream::new(11);
        let parent = encode_unit_interval(0.5, 32);
        let n = 100_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| decode_unit_interval(&mutate_gaussian(parent, 0.01, &mut rng)))
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std = var.sqrt();
        let se = 0.01 / (n as f64).sqrt();
        let x0 = decode_unit_interval(&parent);
        assert!((mean - x0).abs() < 3.0 * se, "mean {mean}");
        assert!((std - 0.01).abs() < 0.05 * 0.01, "std {std}");
    }

    #[test]
    fn per_bit_edge_rates() {
        let mut rng = RngStream::new(3);
        let g = BitGenotype::new(0xDEAD_BEEF, 32).unwrap();
        assert_eq!(mutate_per_bit(g, 0.0, &mut rng), g);
        assert_eq!(mutate_per_bit(g, 1.0, &mut rng), g.complement());
    }

    #[test]
    fn per_bit_mean_hamming() {
        // Binomial(32, 0.1): mean 3.2, variance 2.88.
        let mut rng = RngStream::new(5);
        let g = BitGenotype::zeros(32);
        let n = 100_000;
        let total: u64 = (0..n)
            .map(|_| mutate_per_bit(g, 0.1, &mut rng).count_ones() as u64)
            .sum();
        let mean = total as f64 / n as f64;
        let se = (32.0 * 0.1 * 0.9 / n as f64).sqrt();
        assert!((mean - 3.2).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn large_k_leaves_a_uniform_position() {
        // k = 15 of 16 is drawn via its one unflipped position. Chi-square
        // critical value for df = 15 at significance 0.001 is 37.70.
        let mut rng = RngStream::new(12);
        let z = BitGenotype::zeros(16);
        let mut counts = [0f64; 16];
        for _ in 0..16_000 {
            let kept = (!mutate_k_flips(z, 15, &mut rng).bits() & 0xFFFF).trailing_zeros();
            counts[kept as usize] += 1.0;
        }
        let chi2: f64 = counts.iter().map(|c| (c - 1000.0).powi(2) / 1000.0).sum();
        assert!(chi2 < 37.70, "chi2 {chi2}");
    }

    #[test]
    fn k_flip_examples() {
        let mut rng = RngStream::new(9);
        let z = BitGenotype::zeros(16);
        assert_eq!(mutate_k_flips(z, 1, &mut rng).count_ones(), 1);
        assert_eq!(mutate_k_flips(z, 3, &mut rng).count_ones(), 3);
        let g = BitGenotype::new(0xA5A5, 16).unwrap();
        assert_eq!(mutate_k_flips(g, 16, &mut rng).bits(), 0x5A5A);
    }

    #[test]
    fn elitist_rule() {
        assert!(accept_elitist(5.0, 3.0));
        assert!(!accept_elitist(3.0, 5.0));
        assert!(accept_elitist(4.0, 4.0));
    }

    proptest! {
        #[test]
        fn gaussian_stays_in_unit_interval(u in any::<u32>(), sigma in 1e-4f64..2.0, seed in any::<u64>()) {
            let mut rng = RngStream::new(seed);
            let g = BitGenotype::new(u as u64, 32).unwrap();
            let x = decode_unit_interval(&mutate_gaussian(g, sigma, &mut rng));
            prop_assert!((0.0..=1.0).contains(&x));
        }

        #[test]
        fn k_flips_exact_distance(bits in 0u64..(1 << 16), k in 1u32..=16, seed in any::<u64>()) {
            let mut rng = RngStream::new(seed);
            let g = BitGenotype::new(bits, 16).unwrap();
            prop_assert_eq!(mutate_k_flips(g, k, &mut rng).hamming(&g), k);
        }
    }
}
