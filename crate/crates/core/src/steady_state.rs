//! Steady-state evolution shared by the tree and table meta-evolvers.
//!
//! Each generation performs `population_size` insertion attempts. An attempt
//! picks two parents, applies crossover with the configured probability (else
//! copies the first parent), mutates, evaluates, and replaces the worst
//! individual iff the offspring is strictly better. Lower fitness is better.
//!
//! Randomness: variation draws come from `rng.child(0)`; evaluation number `e`
//! (initial individuals first, then offspring in order) receives
//! `rng.child(1).child(e)`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParentSelection {
    #[default]
    Uniform,
    BinaryTournament,
}

impl std::str::FromStr for ParentSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "tournament" | "binary-tournament" => Ok(Self::BinaryTournament),
            other => Err(Error::param(format!("unknown parent selection `{other}`"))),
        }
    }
}

impl std::fmt::Display for ParentSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::BinaryTournament => "tournament",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub selection: ParentSelection,
}

impl SteadyStateParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::param("population size must be positive"));
        }
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return Err(Error::param(format!(
                "crossover probability {} outside [0, 1]",
                self.crossover_probability
            )));
        }
        Ok(())
    }
}

/// Genome-specific operators.
pub trait Variation: Sync {
    type Genome: Clone + Send + Sync;

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Genome;

    fn crossover<R: Rng + ?Sized>(
        &self,
        a: &Self::Genome,
        b: &Self::Genome,
        rng: &mut R,
    ) -> Self::Genome;

    fn mutate<R: Rng + ?Sized>(&self, g: Self::Genome, rng: &mut R) -> Self::Genome;
}

#[derive(Debug, Clone)]
pub struct Evolution<G> {
    /// Lowest-fitness individual of the final population.
    pub best: G,
    pub fitness: f64,
    /// Best fitness after initialization, then after every insertion attempt.
    pub history: Vec<f64>,
    /// Fitness of the final population, in slot order.
    pub population_fitness: Vec<f64>,
    /// Number of offspring that entered the population.
    pub replacements: usize,
}

fn argmin(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x < xs[best] { i } else { best })
}

fn argmax(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold(0, |worst, (i, &x)| if x > xs[worst] { i } else { worst })
}

fn pick<R: Rng + ?Sized>(selection: ParentSelection, fitness: &[f64], rng: &mut R) -> usize {
    let n = fitness.len();
    match selection {
        ParentSelection::Uniform => rng.random_range(0..n),
        ParentSelection::BinaryTournament => {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if fitness[b] < fitness[a] {
                b
            } else {
                a
            }
        }
    }
}

pub fn evolve<V, F>(
    params: &SteadyStateParams,
    variation: &V,
    fitness: F,
    rng: &RngStream,
) -> Result<Evolution<V::Genome>>
where
    V: Variation,
    F: Fn(&V::Genome, &RngStream) -> Result<f64> + Sync,
{
    params.validate()?;
    let mut ops = rng.child(0);
    let eval_streams = rng.child(1);

    let mut population: Vec<V::Genome> = (0..params.population_size)
        .map(|_| variation.random(&mut ops))
        .collect();
    let mut scores: Vec<f64> = population
        .par_iter()
        .enumerate()
        .map(|(i, g)| fitness(g, &eval_streams.child(i as u64)))
        .collect::<Result<_>>()?;

    let mut next_eval = params.population_size as u64;
    let mut history = Vec::with_capacity(1 + params.generations * params.population_size);
    history.push(scores[argmin(&scores)]);
    let mut replacements = 0;

    for _ in 0..params.generations {
        for _ in 0..params.population_size {
            let p1 = pick(params.selection, &scores, &mut ops);
            let p2 = pick(params.selection, &scores, &mut ops);
            let child = if ops.random_bool(params.crossover_probability) {
                variation.crossover(&population[p1], &population[p2], &mut ops)
            } else {
                population[p1].clone()
            };
            let child = variation.mutate(child, &mut ops);
            let score = fitness(&child, &eval_streams.child(next_eval))?;
            next_eval += 1;

            let worst = argmax(&scores);
            if score < scores[worst] {
                population[worst] = child;
                scores[worst] = score;
                replacements += 1;
            }
            history.push(scores[argmin(&scores)]);
        }
    }

    let best = argmin(&scores);
    Ok(Evolution {
        best: population.swap_remove(best),
        fitness: scores[best],
        history,
        population_fitness: scores,
        replacements,
    })
}
