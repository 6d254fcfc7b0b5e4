//! Real-valued test functions on `[0, 1]` encoded as expression trees, and the
//! steady-state GP that evolves them against a pair of algorithms.

mod ops;
mod tree;

pub use ops::{
    crossover_at, mutate_node, mutate_tree, random_tree, subtree_crossover,
    subtree_crossover_with, TreeGen, CROSSOVER_RETRIES,
};
pub use tree::{GpTree, Node};

use rand::Rng;

use crate::algorithms::{AlgorithmSpec, REAL_BITS};
use crate::duel::{duel, DuelSeeding};
use crate::engine::EngineParams;
use crate::error::{Error, Result};
use crate::genotype::{decode_unit_interval, BitGenotype};
use crate::objective::ObjectiveFunction;
use crate::rng::RngStream;
use crate::steady_state::{self, Evolution, ParentSelection, SteadyStateParams, Variation};

#[derive(Debug, Clone, PartialEq)]
pub struct GpParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub mutations_per_chromosome: usize,
    pub max_depth: usize,
    /// NFL runs per algorithm in each duel.
    pub duel_runs: usize,
    pub meta_runs: usize,
    pub tree_gen: TreeGen,
    pub selection: ParentSelection,
    pub seeding: DuelSeeding,
}

impl Default for GpParams {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 10,
            crossover_probability: 0.9,
            mutations_per_chromosome: 1,
            max_depth: 6,
            duel_runs: 500,
            meta_runs: 30,
            tree_gen: TreeGen::default(),
            selection: ParentSelection::Uniform,
            seeding: DuelSeeding::Independent,
        }
    }
}

impl GpParams {
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
        if self.max_depth == 0 {
            return Err(Error::param("max_depth must be at least 1"));
        }
        if self.duel_runs == 0 {
            return Err(Error::param("duel runs must be positive"));
        }
        Ok(())
    }
}

/// A tree viewed as an objective over 32-bit fixed-point genotypes.
#[derive(Debug, Clone, Copy)]
pub struct GpObjective<'a> {
    pub tree: &'a GpTree,
}

impl<'a> GpObjective<'a> {
    pub fn new(tree: &'a GpTree) -> Self {
        Self { tree }
    }
}

impl ObjectiveFunction for GpObjective<'_> {
    fn bit_len(&self) -> u32 {
        REAL_BITS
    }

    #[inline]
    fn evaluate(&self, g: BitGenotype) -> f64 {
        self.tree.eval(decode_unit_interval(&g))
    }
}

struct TreeVariation<'a> {
    params: &'a GpParams,
}

impl Variation for TreeVariation<'_> {
    type Genome = GpTree;

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> GpTree {
        random_tree(self.params.max_depth, &self.params.tree_gen, rng)
    }

    fn crossover<R: Rng + ?Sized>(&self, a: &GpTree, b: &GpTree, rng: &mut R) -> GpTree {
        subtree_crossover(a, b, self.params.max_depth, rng)
    }

    fn mutate<R: Rng + ?Sized>(&self, mut g: GpTree, rng: &mut R) -> GpTree {
        for _ in 0..self.params.mutations_per_chromosome {
            g = mutate_tree(&g, self.params.max_depth, &self.params.tree_gen, rng);
        }
        g
    }
}

/// Evolves a tree on which `a` reaches lower values than `b`. The returned
/// fitness is the duel fitness of the best tree; negative means `a` won.
pub fn evolve_gp_function(
    a: &AlgorithmSpec,
    b: &AlgorithmSpec,
    gp: &GpParams,
    engine: &EngineParams,
    rng: &RngStream,
) -> Result<Evolution<GpTree>> {
    gp.validate()?;
    for alg in [a, b] {
        if alg.encoding_length != REAL_BITS {
            return Err(Error::dimension(format!(
                "{} uses {} bits; tree functions need {REAL_BITS}-bit encodings",
                alg.name, alg.encoding_length
            )));
        }
    }
    engine.validate(REAL_BITS)?;
    steady_state::evolve(
        &gp.steady_state(),
        &TreeVariation { params: gp },
        |tree, stream| {
            duel(&GpObjective::new(tree), a, b, gp.duel_runs, engine, stream, gp.seeding)
                .map(|d| d.fitness)
        },
        rng,
    )
}
