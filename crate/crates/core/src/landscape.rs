//! Ruggedness of table functions read as one integer-indexed variable.
//!
//! A "peak" is a strict local minimum: both neighbours are strictly higher.
//! An endpoint has one neighbour and is a peak iff that neighbour is strictly
//! higher.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::table::TableFunction;

/// Column label used in reports.
pub const PEAK_LABEL: &str = "local optima (minima): strictly lower than every neighbour, endpoints included";

pub fn count_peaks(values: &[u64]) -> usize {
    match values.len() {
        0 | 1 => 0,
        len => {
            let interior = values
                .windows(3)
                .filter(|w| w[0] > w[1] && w[2] > w[1])
                .count();
            interior + (values[1] > values[0]) as usize + (values[len - 2] > values[len - 1]) as usize
        }
    }
}

pub fn table_peaks(f: &TableFunction) -> usize {
    count_peaks(f.values())
}

/// Expected peak fraction of a table with `2^n` iid uniform `m`-bit entries.
pub fn iid_uniform_peak_fraction(n: u32, m: u32) -> f64 {
    let size = (1u64 << n) as f64;
    let levels = 2f64.powi(m as i32);
    // P(both neighbours higher) = sum_v (1/M) ((M-1-v)/M)^2
    let interior = (levels - 1.0) * levels * (2.0 * levels - 1.0) / (6.0 * levels.powi(3));
    // P(the one neighbour higher) = (M-1) / 2M
    let endpoint = (levels - 1.0) / (2.0 * levels);
    if size < 2.0 {
        return 0.0;
    }
    ((size - 2.0) * interior + 2.0 * endpoint) / size
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeEntry {
    pub file: PathBuf,
    pub input_bits: u32,
    pub output_bits: u32,
    pub peaks: usize,
    /// `peaks / 2^n`.
    pub fraction: f64,
}

impl LandscapeEntry {
    pub fn of(file: impl Into<PathBuf>, f: &TableFunction) -> Self {
        let peaks = table_peaks(f);
        Self {
            file: file.into(),
            input_bits: f.input_bits(),
            output_bits: f.output_bits(),
            peaks,
            fraction: peaks as f64 / f.values().len() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeReport {
    pub entries: Vec<LandscapeEntry>,
    pub mean_peaks: f64,
    pub mean_fraction: f64,
}

impl LandscapeReport {
    pub fn from_entries(entries: Vec<LandscapeEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::param("no tables to analyse"));
        }
        let k = entries.len() as f64;
        let mean_peaks = entries.iter().fold(0.0, |s, e| s + e.peaks as f64) / k;
        let mean_fraction = entries.iter().fold(0.0, |s, e| s + e.fraction) / k;
        Ok(Self {
            entries,
            mean_peaks,
            mean_fraction,
        })
    }

    /// `file,peaks,fraction` rows followed by a `mean` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("file,peaks,fraction\n");
        for e in &self.entries {
            writeln!(out, "{},{},{}", e.file.display(), e.peaks, e.fraction).expect("write to string");
        }
        writeln!(out, "mean,{},{}", self.mean_peaks, self.mean_fraction).expect("write to string");
        out
    }
}

/// Loads every file (in parallel) and counts its peaks. The first failing
/// file, in argument order, is reported with its path.
pub fn landscape_report<P: AsRef<Path> + Sync>(files: &[P]) -> Result<LandscapeReport> {
    let entries = files
        .par_iter()
        .map(|p| {
            let p = p.as_ref();
            TableFunction::load(p).map(|f| LandscapeEntry::of(p, &f))
        })
        .collect::<Result<Vec<_>>>()?;
    LandscapeReport::from_entries(entries)
}
