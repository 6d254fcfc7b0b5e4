use std::fmt::Write;

use rayon::prelude::*;

use crate::algorithms::{AlgorithmSpec, KFlipSemantics};
use crate::engine::EngineParams;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::table::{evolve_table_function, TableEaParams};

use super::ordered_mean;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCell {
    /// Mean over meta-runs of the best evolved fitness.
    pub mean: f64,
    /// Sample standard deviation (0 for a single meta-run).
    pub std: f64,
    /// Best evolved fitness of each meta-run.
    pub fitness: Vec<f64>,
}

impl MatrixCell {
    pub fn from_runs(fitness: Vec<f64>) -> Self {
        let mean = ordered_mean(&fitness);
        let n = fitness.len();
        let std = if n < 2 {
            0.0
        } else {
            // Scaled by the largest deviation so extreme values cannot overflow.
            let scale = fitness.iter().fold(0.0f64, |m, &f| m.max((f - mean).abs()));
            if scale == 0.0 || !scale.is_finite() {
                scale
            } else {
                let ss = fitness.iter().fold(0.0, |acc, &f| acc + ((f - mean) / scale).powi(2));
                scale * (ss / (n - 1) as f64).sqrt()
            }
        };
        Self { mean, std, fitness }
    }
}

/// Pairwise results: `cells[row][col]` holds the pair (row algorithm,
/// column algorithm); the diagonal is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixReport {
    pub algorithms: Vec<String>,
    pub meta_runs: usize,
    pub cells: Vec<Vec<Option<MatrixCell>>>,
}

impl MatrixReport {
    pub fn cell(&self, row: &str, col: &str) -> Option<&MatrixCell> {
        let r = self.algorithms.iter().position(|a| a == row)?;
        let c = self.algorithms.iter().position(|a| a == col)?;
        self.cells[r][c].as_ref()
    }

    /// `row,column,mean_fitness,std,meta_runs`, one line per off-diagonal
    /// pair in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,column,mean_fitness,std,meta_runs\n");
        for (r, row) in self.cells.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Some(cell) = cell {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        self.algorithms[r], self.algorithms[c], cell.mean, cell.std, self.meta_runs
                    )
                    .expect("write to string");
                }
            }
        }
        out
    }

    /// Square table of means with `-` on the diagonal.
    pub fn to_text_table(&self) -> String {
        let body: Vec<Vec<String>> = self
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.as_ref().map_or_else(|| "-".to_string(), |c| format!("{:.1}", c.mean)))
                    .collect()
            })
            .collect();
        let width = body
            .iter()
            .flatten()
            .chain(self.algorithms.iter())
            .map(String::len)
            .max()
            .unwrap_or(1);
        let label = self.algorithms.iter().map(String::len).max().unwrap_or(1);

        let mut out = String::new();
        write!(out, "{:label$}", "").expect("write to string");
        for a in &self.algorithms {
            write!(out, " {a:>width$}").expect("write to string");
        }
        out.push('\n');
        for (name, row) in self.algorithms.iter().zip(&body) {
            write!(out, "{name:<label$}").expect("write to string");
            for v in row {
                write!(out, " {v:>width$}").expect("write to string");
            }
            out.push('\n');
        }
        out
    }
}

/// All ordered pairs of `B1..B16`.
pub fn matrix_experiment(
    params: &TableEaParams,
    engine: &EngineParams,
    rng: &RngStream,
) -> Result<MatrixReport> {
    matrix_experiment_over(&AlgorithmSpec::table_presets(KFlipSemantics::Shell), params, engine, rng)
}

/// Evolves table functions for every ordered pair of `algorithms`,
/// `params.meta_runs` times each. Pair `(r, c)` of an `n`-algorithm list uses
/// stream `rng.child(r * n + c)`, and meta-run `m` within it `.child(m)`.
pub fn matrix_experiment_over(
    algorithms: &[AlgorithmSpec],
    params: &TableEaParams,
    engine: &EngineParams,
    rng: &RngStream,
) -> Result<MatrixReport> {
    let n = algorithms.len();
    if n < 2 {
        return Err(Error::param("a matrix needs at least two algorithms"));
    }
    if params.meta_runs == 0 {
        return Err(Error::param("meta_runs must be positive"));
    }
    let units: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
        .flat_map(|(r, c)| (0..params.meta_runs).map(move |m| (r, c, m)))
        .collect();

    let fitness: Vec<f64> = units
        .par_iter()
        .map(|&(r, c, m)| {
            let stream = rng.child((r * n + c) as u64).child(m as u64);
            evolve_table_function(&algorithms[r], &algorithms[c], params, engine, &stream)
                .map(|evo| evo.fitness)
        })
        .collect::<Result<_>>()?;

    let mut cells: Vec<Vec<Option<MatrixCell>>> = vec![vec![None; n]; n];
    for (chunk, pair) in fitness.chunks(params.meta_runs).zip(units.chunks(params.meta_runs)) {
        let (r, c, _) = pair[0];
        cells[r][c] = Some(MatrixCell::from_runs(chunk.to_vec()));
    }
    Ok(MatrixReport {
        algorithms: algorithms.iter().map(|a| a.name.clone()).collect(),
        meta_runs: params.meta_runs,
        cells,
    })
}
