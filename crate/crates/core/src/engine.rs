//! The archive-based single-individual search loop.
//!
//! A run starts from a uniform random point and keeps producing *distinct*
//! points until `max_steps` of them have been visited. Each new point is
//! obtained by mutating the current one until an offspring is both outside
//! the archive and accepted by the algorithm, giving up after
//! `max_mutations` attempts; then uniform random points are drawn until one
//! is unarchived. The new point always becomes the current point.

use rand::Rng;

use crate::algorithms::AlgorithmSpec;
use crate::archive::Archive;
use crate::error::{Error, Result};
use crate::genotype::BitGenotype;
use crate::objective::ObjectiveFunction;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineParams {
    /// Number of distinct points a run visits.
    pub max_steps: usize,
    /// Mutation attempts before jumping to a random point.
    pub max_mutations: usize,
    /// Also archive (and count) evaluated offspring that were rejected.
    pub count_rejected: bool,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            max_steps: 100,
            max_mutations: 20,
            count_rejected: false,
        }
    }
}

impl EngineParams {
    pub fn new(max_steps: usize, max_mutations: usize) -> Self {
        Self {
            max_steps,
            max_mutations,
            ..Self::default()
        }
    }

    pub fn validate(&self, bit_len: u32) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::param("max_steps must be at least 1"));
        }
        if self.max_mutations == 0 {
            return Err(Error::param("max_mutations must be at least 1"));
        }
        if self.max_steps as u64 > BitGenotype::space_size(bit_len) {
            return Err(Error::param(format!(
                "max_steps {} exceeds the {} points of a {bit_len}-bit space",
                self.max_steps,
                BitGenotype::space_size(bit_len)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome {
    /// Minimum objective value over the archive.
    pub best_value: f64,
    pub best: BitGenotype,
    /// Final archive size.
    pub distinct_visited: usize,
    /// Number of random jumps taken after the mutation budget ran out.
    pub reinit_count: usize,
    /// Objective evaluations, including rejected offspring.
    pub evaluations: usize,
}

/// Where a selected point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Accepted offspring found on mutation attempt `attempts`.
    Mutation { attempts: usize },
    /// Random jump after the mutation budget ran out; `draws` uniform samples
    /// were needed to hit an unarchived point.
    Restart { draws: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub genotype: BitGenotype,
    pub value: f64,
    pub origin: Origin,
    pub evaluations: usize,
}

/// Full record of a run: the outcome plus every archived point with its value,
/// in visiting order.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub outcome: RunOutcome,
    pub visited: Vec<(BitGenotype, f64)>,
}

impl RunTrace {
    /// Minimum over each archive prefix.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.visited
            .iter()
            .scan(f64::INFINITY, |best, &(_, v)| {
                *best = best.min(v);
                Some(*best)
            })
            .collect()
    }
}

/// Bookkeeping for offspring rejected by the acceptance rule.
trait Visited {
    fn contains(&self, g: &BitGenotype) -> bool;
    /// Records a rejected, unarchived offspring. Returns `false` when the run
    /// has no room left.
    fn rejected(&mut self, g: BitGenotype, value: f64) -> bool;
}

impl Visited for &Archive {
    fn contains(&self, g: &BitGenotype) -> bool {
        Archive::contains(self, g)
    }

    fn rejected(&mut self, _: BitGenotype, _: f64) -> bool {
        true
    }
}

struct RunState {
    archive: Archive,
    values: Vec<f64>,
    count_rejected: bool,
}

impl RunState {
    fn push(&mut self, g: BitGenotype, value: f64) {
        let inserted = self.archive.insert(g).expect("archive has room");
        debug_assert!(inserted, "selected point was already archived");
        self.values.push(value);
    }
}

impl Visited for RunState {
    fn contains(&self, g: &BitGenotype) -> bool {
        self.archive.contains(g)
    }

    fn rejected(&mut self, g: BitGenotype, value: f64) -> bool {
        if self.count_rejected {
            self.push(g, value);
            !self.archive.is_full()
        } else {
            true
        }
    }
}

#[inline]
fn select_inner<O, R, V>(
    curr: BitGenotype,
    curr_value: f64,
    algorithm: &AlgorithmSpec,
    objective: &O,
    visited: &mut V,
    max_mutations: usize,
    rng: &mut R,
) -> Result<Selection, usize>
where
    O: ObjectiveFunction + ?Sized,
    R: Rng + ?Sized,
    V: Visited,
{
    let mut evaluations = 0;
    for attempt in 1..=max_mutations {
        let candidate = algorithm.mutate(curr, rng);
        if visited.contains(&candidate) {
            continue;
        }
        let value = objective.evaluate(candidate);
        evaluations += 1;
        if algorithm.accepts(curr_value, value) {
            return Ok(Selection {
                genotype: candidate,
                value,
                origin: Origin::Mutation { attempts: attempt },
                evaluations,
            });
        }
        if !visited.rejected(candidate, value) {
            return Err(evaluations);
        }
    }

    // Neighbourhood looks exhausted: jump. The jump ignores the acceptance rule.
    let len = curr.len();
    let mut draws = 0;
    loop {
        draws += 1;
        let candidate = BitGenotype::random(len, rng);
        if !visited.contains(&candidate) {
            let value = objective.evaluate(candidate);
            return Ok(Selection {
                genotype: candidate,
                value,
                origin: Origin::Restart { draws },
                evaluations: evaluations + 1,
            });
        }
    }
}

/// Picks the next point of a run without modifying the archive.
///
/// The archive must not cover the whole space, otherwise the random jump
/// cannot terminate.
pub fn select_new_solution<O, R>(
    curr: BitGenotype,
    curr_value: f64,
    algorithm: &AlgorithmSpec,
    objective: &O,
    archive: &Archive,
    max_mutations: usize,
    rng: &mut R,
) -> Selection
where
    O: ObjectiveFunction + ?Sized,
    R: Rng + ?Sized,
{
    assert!(
        (archive.len() as u64) < BitGenotype::space_size(curr.len()),
        "archive covers the whole search space"
    );
    let mut view = archive;
    select_inner(curr, curr_value, algorithm, objective, &mut view, max_mutations, rng)
        .expect("read-only selection always yields a point")
}

fn check_dims<O: ObjectiveFunction + ?Sized>(
    algorithm: &AlgorithmSpec,
    objective: &O,
    params: &EngineParams,
) -> Result<()> {
    if algorithm.encoding_length != objective.bit_len() {
        return Err(Error::dimension(format!(
            "algorithm {} encodes {} bits but the objective takes {}",
            algorithm.name,
            algorithm.encoding_length,
            objective.bit_len()
        )));
    }
    algorithm.validate()?;
    params.validate(objective.bit_len())
}

/// One run; a pure function of its arguments and the stream's state.
pub fn run_nfl<O>(
    algorithm: &AlgorithmSpec,
    objective: &O,
    params: &EngineParams,
    rng: &mut RngStream,
) -> Result<RunOutcome>
where
    O: ObjectiveFunction + ?Sized,
{
    run_nfl_traced(algorithm, objective, params, rng).map(|t| t.outcome)
}

pub fn run_nfl_traced<O>(
    algorithm: &AlgorithmSpec,
    objective: &O,
    params: &EngineParams,
    rng: &mut RngStream,
) -> Result<RunTrace>
where
    O: ObjectiveFunction + ?Sized,
{
    check_dims(algorithm, objective, params)?;
    let len = objective.bit_len();

    let mut state = RunState {
        archive: Archive::new(params.max_steps),
        values: Vec::with_capacity(params.max_steps.min(1 << 16)),
        count_rejected: params.count_rejected,
    };

    let mut curr = BitGenotype::random(len, rng);
    let mut curr_value = objective.evaluate(curr);
    state.push(curr, curr_value);
    let mut evaluations = 1;
    let mut reinit_count = 0;

    while !state.archive.is_full() {
        let sel = match select_inner(
            curr,
            curr_value,
            algorithm,
            objective,
            &mut state,
            params.max_mutations,
            rng,
        ) {
            Ok(sel) => sel,
            // Rejected offspring filled the archive.
            Err(spent) => {
                evaluations += spent;
                break;
            }
        };
        evaluations += sel.evaluations;
        if matches!(sel.origin, Origin::Restart { .. }) {
            reinit_count += 1;
        }
        state.push(sel.genotype, sel.value);
        curr = sel.genotype;
        curr_value = sel.value;
    }

    let (best_index, best_value) = state
        .values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let members = state.archive.members();
    let outcome = RunOutcome {
        best_value,
        best: members[best_index],
        distinct_visited: members.len(),
        reinit_count,
        evaluations,
    };
    let visited = members.iter().copied().zip(state.values).collect();
    Ok(RunTrace { outcome, visited })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{Acceptance, Mutation};
    use crate::objective::FnObjective;

    fn b(k: u32) -> AlgorithmSpec {
        AlgorithmSpec::new(format!("k{k}"), 4, Mutation::KFlips { k }, Acceptance::Elitist).unwrap()
    }

    #[test]
    fn constant_objective_exhaustive() {
        let f = FnObjective::new(4, |_| 0.0);
        let params = EngineParams::new(16, 20);
        for seed in 0..20 {
            let out = run_nfl(&b(1), &f, &params, &mut RngStream::new(seed)).unwrap();
            assert_eq!(out.best_value, 0.0);
            assert_eq!(out.distinct_visited, 16);
        }
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let f = FnObjective::new(8, |_| 0.0);
        let err = run_nfl(&b(1), &f, &EngineParams::new(4, 2), &mut RngStream::new(0));
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn rejects_impossible_step_budget() {
        let f = FnObjective::new(4, |_| 0.0);
        assert!(run_nfl(&b(1), &f, &EngineParams::new(17, 2), &mut RngStream::new(0)).is_err());
        assert!(run_nfl(&b(1), &f, &EngineParams::new(0, 2), &mut RngStream::new(0)).is_err());
        assert!(run_nfl(&b(1), &f, &EngineParams::new(4, 0), &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn exhausted_neighbourhood_forces_jump() {
        let f = FnObjective::new(4, |g| g.bits() as f64);
        let curr = BitGenotype::new(0b0101, 4).unwrap();
        let mut archive = Archive::new(16);
        archive.insert(curr).unwrap();
        for i in 0..4 {
            archive.insert(curr.flipped(i)).unwrap();
        }
        let mut rng = RngStream::new(1);
        for _ in 0..50 {
            let sel = select_new_solution(curr, 5.0, &b(1), &f, &archive, 10, &mut rng);
            assert!(matches!(sel.origin, Origin::Restart { .. }));
            assert!(!archive.contains(&sel.genotype));
            assert_eq!(sel.value, sel.genotype.bits() as f64);
        }
    }

    #[test]
    fn first_mutant_taken_under_accept_all() {
        let f = FnObjective::new(4, |g| g.bits() as f64);
        let curr = BitGenotype::new(0b0011, 4).unwrap();
        let mut archive = Archive::new(16);
        archive.insert(curr).unwrap();
        for k in 1..=3 {
            let alg =
                AlgorithmSpec::new("all", 4, Mutation::KFlips { k }, Acceptance::AcceptAll).unwrap();
            let sel =
                select_new_solution(curr, 3.0, &alg, &f, &archive, 5, &mut RngStream::new(k as u64));
            assert_eq!(sel.origin, Origin::Mutation { attempts: 1 });
            assert_eq!(sel.genotype.hamming(&curr), k);
        }
    }

    #[test]
    fn worse_neighbours_exhaust_budget() {
        // curr = 0 sits in a strict 1-bit basin: every single flip is worse.
        let f = FnObjective::new(4, |g| g.count_ones() as f64);
        let curr = BitGenotype::zeros(4);
        let mut archive = Archive::new(16);
        archive.insert(curr).unwrap();
        let mut seen = std::collections::HashSet::new();
        for seed in 0..400 {
            let sel =
                select_new_solution(curr, 0.0, &b(1), &f, &archive, 5, &mut RngStream::new(seed));
            assert_eq!(sel.origin, Origin::Restart { draws: sel_draws(&sel) });
            assert_eq!(sel.evaluations, 6);
            assert_ne!(sel.genotype, curr);
            seen.insert(sel.genotype);
        }
        // Every one of the 15 unarchived points is reachable by the jump.
        assert_eq!(seen.len(), 15);
    }

    fn sel_draws(sel: &Selection) -> usize {
        match sel.origin {
            Origin::Restart { draws } => draws,
            Origin::Mutation { .. } => panic!("expected a jump, got {:?}", sel.origin),
        }
    }

    #[test]
    fn best_so_far_is_monotone_and_archive_distinct() {
        let f = FnObjective::new(16, |g| ((g.bits() * 2654435761) % 1000) as f64);
        let params = EngineParams::new(300, 5);
        for seed in 0..10 {
            let t = run_nfl_traced(&b_len(16, 3), &f, &params, &mut RngStream::new(seed)).unwrap();
            let best = t.best_so_far();
            assert!(best.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*best.last().unwrap(), t.outcome.best_value);
            let distinct: std::collections::HashSet<_> = t.visited.iter().map(|v| v.0).collect();
            assert_eq!(distinct.len(), 300);
            assert_eq!(t.outcome.distinct_visited, 300);
        }
    }

    fn b_len(len: u32, k: u32) -> AlgorithmSpec {
        AlgorithmSpec::new("k", len, Mutation::KFlips { k }, Acceptance::Elitist).unwrap()
    }

    #[test]
    fn elitist_chain_is_monotone_between_jumps() {
        let f = FnObjective::new(16, |g| ((g.bits() * 40503) % 977) as f64);
        let alg = b_len(16, 2);
        let mut rng = RngStream::new(4);
        let mut archive = Archive::new(200);
        let mut curr = BitGenotype::random(16, &mut rng);
        let mut value = f.evaluate(curr);
        archive.insert(curr).unwrap();
        for _ in 0..199 {
            let sel = select_new_solution(curr, value, &alg, &f, &archive, 8, &mut rng);
            if let Origin::Mutation { .. } = sel.origin {
                assert!(sel.value <= value);
            }
            archive.insert(sel.genotype).unwrap();
            curr = sel.genotype;
            value = sel.value;
        }
    }

    #[test]
    fn counting_rejected_offspring_fills_archive() {
        let f = FnObjective::new(16, |g| g.count_ones() as f64);
        let params = EngineParams {
            count_rejected: true,
            ..EngineParams::new(50, 20)
        };
        let t = run_nfl_traced(&b_len(16, 1), &f, &params, &mut RngStream::new(2)).unwrap();
        assert_eq!(t.outcome.distinct_visited, 50);
        assert_eq!(t.visited.len(), 50);
        let min = t.visited.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        assert_eq!(t.outcome.best_value, min);
    }

    #[test]
    fn deterministic_given_seed() {
        let f = FnObjective::new(16, |g| (g.bits() % 97) as f64);
        let params = EngineParams::default();
        let a = run_nfl(&b_len(16, 2), &f, &params, &mut RngStream::new(77)).unwrap();
        let b = run_nfl(&b_len(16, 2), &f, &params, &mut RngStream::new(77)).unwrap();
        assert_eq!(a, b);
    }
}
