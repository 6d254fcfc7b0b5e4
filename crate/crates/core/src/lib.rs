//! Evolving optimization test functions matched to a black-box algorithm.
//!
//! Given two search algorithms `A` and `B`, the meta-evolvers in [`gp`] and
//! [`table`] look for objective functions on which `A` finds lower values than
//! `B`. Each candidate function is scored by a [`duel`]: both algorithms are run
//! many times through the archive-based single-individual loop in [`engine`],
//! and the fitness is the difference of their mean best values. A negative
//! fitness means `A` won.
//!
//! The compared algorithms live in [`algorithms`]; all of them share the
//! [`BitGenotype`] encoding and the distinct-point accounting of [`Archive`].

pub mod algorithms;
pub mod archive;
pub mod duel;
pub mod engine;
pub mod error;
pub mod genotype;
pub mod gp;
pub mod landscape;
pub mod objective;
pub mod rng;
pub mod steady_state;
pub mod table;

pub use algorithms::{Acceptance, AlgorithmSpec, KFlipSemantics, Mutation};
pub use archive::{Archive, ArchiveFull};
pub use duel::{duel, Contender, DuelResult, DuelSeeding, DuelSeeds, MatrixCell, MatrixReport};
pub use engine::{run_nfl, EngineParams, RunOutcome};
pub use error::{Error, Result};
pub use genotype::{decode_unit_interval, encode_unit_interval, BitGenotype};
pub use gp::{GpObjective, GpParams, GpTree, Node};
pub use landscape::{count_peaks, LandscapeEntry, LandscapeReport};
pub use objective::{ObjectiveFunction, PENALTY};
pub use rng::RngStream;
pub use steady_state::{Evolution, ParentSelection};
pub use table::{TableEaParams, TableFunction};
