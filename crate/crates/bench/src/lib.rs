//! Fixed inputs shared by the benchmarks.

use nfl_core::{GpTree, RngStream, TableFunction};

/// A uniform random 16-to-8-bit table.
pub fn random_table(seed: u64) -> TableFunction {
    TableFunction::random(16, 8, &mut RngStream::new(seed)).expect("valid dimensions")
}

/// A depth-5 tree mixing every operator.
pub fn sample_tree() -> GpTree {
    "(add (sub (mul c-6 (mul x (mul x x))) x) (sin (exp (mul x c2.5))))"
        .parse()
        .expect("valid tree")
}
