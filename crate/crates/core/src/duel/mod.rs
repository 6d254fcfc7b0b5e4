//! Duel fitness: the mean best value reached by algorithm `A` minus that of
//! algorithm `B` on one objective, each averaged over independent runs.

mod matrix;

pub use matrix::{matrix_experiment, matrix_experiment_over, MatrixCell, MatrixReport};

use rayon::prelude::*;

use crate::algorithms::AlgorithmSpec;
use crate::engine::{run_nfl, EngineParams};
use crate::error::{Error, Result};
use crate::objective::ObjectiveFunction;
use crate::rng::RngStream;

/// How the two sides of a duel are seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuelSeeding {
    /// `A` and `B` draw from independent seed sets.
    #[default]
    Independent,
    /// Run `i` of `A` and run `i` of `B` share a seed (common random numbers).
    Paired,
}

/// Seed sets for both sides: run `i` of a side uses `side.child(i)`.
#[derive(Debug, Clone)]
pub struct DuelSeeds {
    pub a: RngStream,
    pub b: RngStream,
}

impl DuelSeeds {
    pub fn derive(rng: &RngStream, seeding: DuelSeeding) -> Self {
        let a = rng.child(0);
        let b = match seeding {
            DuelSeeding::Independent => rng.child(1),
            DuelSeeding::Paired => a.clone(),
        };
        Self { a, b }
    }

    pub fn swapped(self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }
}

/// One side of a duel.
#[derive(Debug, Clone, Copy)]
pub struct Contender<'a> {
    pub algorithm: &'a AlgorithmSpec,
    pub engine: &'a EngineParams,
}

impl<'a> Contender<'a> {
    pub fn new(algorithm: &'a AlgorithmSpec, engine: &'a EngineParams) -> Self {
        Self { algorithm, engine }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuelResult {
    pub avg_a: f64,
    pub avg_b: f64,
    /// `avg_a - avg_b`; negative means `A` won.
    pub fitness: f64,
    pub runs: usize,
    pub best_a: Vec<f64>,
    pub best_b: Vec<f64>,
}

/// Left-to-right mean, independent of how the values were computed. Falls
/// back to summing scaled terms if the plain sum overflows.
pub fn ordered_mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let sum = values.iter().fold(0.0, |acc, &v| acc + v);
    if sum.is_finite() || values.iter().any(|v| !v.is_finite()) {
        sum / n
    } else {
        values.iter().fold(0.0, |acc, &v| acc + v / n)
    }
}

fn best_values<O>(objective: &O, side: Contender<'_>, runs: usize, seeds: &RngStream) -> Result<Vec<f64>>
where
    O: ObjectiveFunction + ?Sized,
{
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeds.child(i as u64);
            run_nfl(side.algorithm, objective, side.engine, &mut rng).map(|o| o.best_value)
        })
        .collect()
}

/// Duel with explicit sides and seed sets.
pub fn duel_with_seeds<O>(
    objective: &O,
    a: Contender<'_>,
    b: Contender<'_>,
    runs: usize,
    seeds: &DuelSeeds,
) -> Result<DuelResult>
where
    O: ObjectiveFunction + ?Sized,
{
    if runs == 0 {
        return Err(Error::param("a duel needs at least one run per algorithm"));
    }
    for side in [a, b] {
        if side.algorithm.encoding_length != objective.bit_len() {
            return Err(Error::dimension(format!(
                "{} encodes {} bits, objective takes {}",
                side.algorithm.name,
                side.algorithm.encoding_length,
                objective.bit_len()
            )));
        }
    }
    let (best_a, best_b) = rayon::join(
        || best_values(objective, a, runs, &seeds.a),
        || best_values(objective, b, runs, &seeds.b),
    );
    let (best_a, best_b) = (best_a?, best_b?);
    let avg_a = ordered_mean(&best_a);
    let avg_b = ordered_mean(&best_b);
    Ok(DuelResult {
        avg_a,
        avg_b,
        fitness: avg_a - avg_b,
        runs,
        best_a,
        best_b,
    })
}

/// Runs `a` and `b` `runs` times each on `objective` with seeds derived from
/// `rng`, and reports the difference of their mean best values.
pub fn duel<O>(
    objective: &O,
    a: &AlgorithmSpec,
    b: &AlgorithmSpec,
    runs: usize,
    engine: &EngineParams,
    rng: &RngStream,
    seeding: DuelSeeding,
) -> Result<DuelResult>
where
    O: ObjectiveFunction + ?Sized,
{
    duel_with_seeds(
        objective,
        Contender::new(a, engine),
        Contender::new(b, engine),
        runs,
        &DuelSeeds::derive(rng, seeding),
    )
}
