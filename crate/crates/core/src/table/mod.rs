//! Discrete test functions stored extensionally as lookup tables
//! `{0,1}^n -> {0,1}^m`, and the steady-state binary EA that evolves them.
//!
//! A table is treated as one long bit string of `2^n * m` bits (entry `i`
//! contributes bits `i*m .. i*m+m`, least significant first); crossover and
//! mutation act on that string.

mod format;

pub use format::{MAGIC, VERSION};

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Geometric};

use crate::algorithms::AlgorithmSpec;
use crate::duel::{duel, DuelSeeding};
use crate::engine::EngineParams;
use crate::error::{Error, Result};
use crate::genotype::BitGenotype;
use crate::objective::ObjectiveFunction;
use crate::rng::RngStream;
use crate::steady_state::{self, Evolution, ParentSelection, SteadyStateParams, Variation};

pub const MAX_INPUT_BITS: u32 = 24;
pub const MAX_OUTPUT_BITS: u32 = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct TableFunction {
    n: u32,
    m: u32,
    values: Vec<u64>,
}

impl std::fmt::Debug for TableFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TableFunction")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("len", &self.values.len())
            .finish()
    }
}

#[inline]
fn value_mask(m: u32) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

fn check_dims(n: u32, m: u32) -> Result<()> {
    if n == 0 || n > MAX_INPUT_BITS {
        return Err(Error::param(format!("input bits must be in 1..={MAX_INPUT_BITS}, got {n}")));
    }
    if m == 0 || m > MAX_OUTPUT_BITS {
        return Err(Error::param(format!("output bits must be in 1..={MAX_OUTPUT_BITS}, got {m}")));
    }
    Ok(())
}

/// Hands out `k`-bit chunks of a buffered 64-bit random word.
struct RandomBits {
    buf: u64,
    avail: u32,
}

impl RandomBits {
    fn new() -> Self {
        Self { buf: 0, avail: 0 }
    }

    #[inline]
    fn take<R: RngCore + ?Sized>(&mut self, k: u32, rng: &mut R) -> u64 {
        if k >= 64 {
            return rng.next_u64();
        }
        if self.avail < k {
            self.buf = rng.next_u64();
            self.avail = 64;
        }
        let out = self.buf & value_mask(k);
        self.buf >>= k;
        self.avail -= k;
        out
    }
}

impl TableFunction {
    pub fn new(n: u32, m: u32, values: Vec<u64>) -> Result<Self> {
        check_dims(n, m)?;
        if values.len() != 1usize << n {
            return Err(Error::dimension(format!(
                "table for n={n} needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, &v)| v & !value_mask(m) != 0) {
            return Err(Error::param(format!("entry {i} = {v} does not fit in {m} bits")));
        }
        Ok(Self { n, m, values })
    }

    pub fn from_fn(n: u32, m: u32, f: impl FnMut(u64) -> u64) -> Result<Self> {
        check_dims(n, m)?;
        Self::new(n, m, (0..1u64 << n).map(f).collect())
    }

    pub fn constant(n: u32, m: u32, value: u64) -> Result<Self> {
        Self::from_fn(n, m, |_| value)
    }

    /// Every entry uniform on `[0, 2^m - 1]`.
    pub fn random<R: Rng + ?Sized>(n: u32, m: u32, rng: &mut R) -> Result<Self> {
        check_dims(n, m)?;
        let mut bits = RandomBits::new();
        let values = (0..1usize << n).map(|_| bits.take(m, rng)).collect();
        Ok(Self { n, m, values })
    }

    pub fn input_bits(&self) -> u32 {
        self.n
    }

    pub fn output_bits(&self) -> u32 {
        self.m
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u64> {
        self.values
    }

    /// Largest representable entry, `2^m - 1`.
    pub fn max_value(&self) -> u64 {
        value_mask(self.m)
    }

    /// Length of the table's bit-string encoding, `2^n * m`.
    pub fn bit_count(&self) -> u64 {
        (self.values.len() as u64) * self.m as u64
    }

    /// Value at the index given by the genotype's unsigned integer.
    #[inline]
    pub fn eval_table(&self, g: &BitGenotype) -> u64 {
        debug_assert_eq!(g.len(), self.n);
        self.values[g.bits() as usize]
    }

    /// Number of differing bits between two equally shaped tables.
    pub fn bit_distance(&self, other: &Self) -> u64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::dimension(format!(
                "tables differ in shape: n={}, m={} vs n={}, m={}",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(())
    }
}

impl ObjectiveFunction for TableFunction {
    fn bit_len(&self) -> u32 {
        self.n
    }

    #[inline]
    fn evaluate(&self, g: BitGenotype) -> f64 {
        self.eval_table(&g) as f64
    }
}

/// Bitwise merge: where a mask bit is set the offspring takes `a`'s bit.
fn blend(a: &TableFunction, b: &TableFunction, mut mask: impl FnMut() -> u64) -> TableFunction {
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| {
            let m = mask();
            (x & m) | (y & !m)
        })
        .collect();
    TableFunction {
        n: a.n,
        m: a.m,
        values,
    }
}

/// Each bit of the offspring comes from `a` or `b` with probability 1/2.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &TableFunction,
    b: &TableFunction,
    rng: &mut R,
) -> Result<TableFunction> {
    a.same_shape(b)?;
    let mut bits = RandomBits::new();
    let m = a.m;
    Ok(blend(a, b, || bits.take(m, rng)))
}

/// Flips each of the `2^n * m` bits independently with probability `p`.
pub fn mutate_table<R: Rng + ?Sized>(f: &TableFunction, p: f64, rng: &mut R) -> Result<TableFunction> {
    let mut out = f.clone();
    mutate_table_in_place(&mut out, p, rng)?;
    Ok(out)
}

pub fn mutate_table_in_place<R: Rng + ?Sized>(f: &mut TableFunction, p: f64, rng: &mut R) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("mutation probability {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(0);
    }
    // Gaps between flipped positions are geometric; equivalent to one
    // Bernoulli draw per bit.
    let gaps = Geometric::new(p).map_err(|e| Error::param(e.to_string()))?;
    let total = f.bit_count();
    let m = f.m as u64;
    let mut pos = 0u64;
    let mut flips = 0;
    loop {
        pos = pos.saturating_add(gaps.sample(rng));
        if pos >= total {
            break;
        }
        f.values[(pos / m) as usize] ^= 1 << (pos % m);
        flips += 1;
        pos += 1;
    }
    Ok(flips)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub mutation_rate: f64,
    /// NFL runs per algorithm in each duel.
    pub duel_runs: usize,
    pub meta_runs: usize,
    pub input_bits: u32,
    pub output_bits: u32,
    pub selection: ParentSelection,
    pub seeding: DuelSeeding,
}

impl Default for TableEaParams {
    fn default() -> Self {
        Self {
            population_size: 10,
            generations: 10,
            crossover_probability: 0.9,
            mutation_rate: 0.01,
            duel_runs: 100,
            meta_runs: 30,
            input_bits: 16,
            output_bits: 8,
            selection: ParentSelection::Uniform,
            seeding: DuelSeeding::Independent,
        }
    }
}

impl TableEaParams {
    fn steady_state(&self) -> SteadyStateParams {
        SteadyStateParams {
            population_size: self.population_size,
            generations: self.generations,
            crossover_probability: self.crossover_probability,
            selection: self.selection,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.steady_state().validate()?;
        check_dims(self.input_bits, self.output_bits)?;
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::param(format!("mutation rate {} outside [0, 1]", self.mutation_rate)));
        }
        if self.duel_runs == 0 {
            return Err(Error::param("duel runs must be positive"));
        }
        Ok(())
    }
}

struct TableVariation<'a> {
    params: &'a TableEaParams,
}

impl Variation for TableVariation<'_> {
    type Genome = TableFunction;

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> TableFunction {
        TableFunction::random(self.params.input_bits, self.params.output_bits, rng)
            .expect("dimensions validated")
    }

    fn crossover<R: Rng + ?Sized>(&self, a: &TableFunction, b: &TableFunction, rng: &mut R) -> TableFunction {
        uniform_crossover(a, b, rng).expect("population shares one shape")
    }

    fn mutate<R: Rng + ?Sized>(&self, mut g: TableFunction, rng: &mut R) -> TableFunction {
        mutate_table_in_place(&mut g, self.params.mutation_rate, rng).expect("rate validated");
        g
    }
}

/// Evolves a table on which `a` reaches lower values than `b`; negative
/// fitness means `a` won.
pub fn evolve_table_function(
    a: &AlgorithmSpec,
    b: &AlgorithmSpec,
    ea: &TableEaParams,
    engine: &EngineParams,
    rng: &RngStream,
) -> Result<Evolution<TableFunction>> {
    ea.validate()?;
    for alg in [a, b] {
        if alg.encoding_length != ea.input_bits {
            return Err(Error::dimension(format!(
                "{} uses {} bits; tables take {}-bit inputs",
                alg.name, alg.encoding_length, ea.input_bits
            )));
        }
    }
    engine.validate(ea.input_bits)?;
    steady_state::evolve(
        &ea.steady_state(),
        &TableVariation { params: ea },
        |table, stream| duel(table, a, b, ea.duel_runs, engine, stream, ea.seeding).map(|d| d.fitness),
        rng,
    )
}
