//! Command-line driver for the meta-evolution experiments.

pub mod commands;
pub mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Command, Settings};

#[derive(Debug, Parser)]
#[command(name = "nfl-evolve", version, about = "Evolve test functions on which one search algorithm beats another")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Evolve real-valued tree functions for a pair of A-algorithms.
    EvolveGp(Opts),
    /// Evolve lookup-table functions for a pair of B-algorithms.
    EvolveTable(Opts),
    /// Evolve tables for every ordered pair of a list of algorithms.
    Matrix(Opts),
    /// Count local minima of stored tables.
    Landscape {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run one algorithm repeatedly on a stored table or tree.
    Replay {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

/// Every option is also a config-file key (dashes become underscores).
#[derive(Debug, Default, Args)]
pub struct Opts {
    /// Flat key=value settings file; command-line options take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Algorithm pair `A,B`; negative fitness means A won.
    #[arg(long)]
    pub pair: Option<String>,
    /// NFL runs per algorithm (per duel, or per replay).
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub meta_runs: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub max_mutations: Option<usize>,
    /// Worker threads (0 = one per core). Does not change any output.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub crossover_probability: Option<f64>,
    /// Per-bit mutation probability for tables.
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    #[arg(long)]
    pub mutations_per_chromosome: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub leaf_probability: Option<f64>,
    #[arg(long)]
    pub constant_probability: Option<f64>,
    #[arg(long)]
    pub constant_range: Option<f64>,
    /// Trees use `x` as their only terminal.
    #[arg(long)]
    pub no_constants: bool,
    /// Archive rejected offspring and charge them against max-steps.
    #[arg(long)]
    pub count_rejected: bool,
    /// Run i of A and run i of B share a seed.
    #[arg(long)]
    pub paired_seeds: bool,
    /// `shell` (exactly k flips) or `per-bit` (rate k/16).
    #[arg(long)]
    pub bk_semantics: Option<String>,
    /// `uniform` or `tournament` parent selection.
    #[arg(long)]
    pub selection: Option<String>,
    /// Comma-separated presets for `matrix`.
    #[arg(long)]
    pub algorithms: Option<String>,
    /// Preset for `replay`.
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub input_bits: Option<u32>,
    #[arg(long)]
    pub output_bits: Option<u32>,
    /// Append the expected peak fraction of iid uniform tables.
    #[arg(long)]
    pub random_baseline: bool,
}

impl Opts {
    fn overrides(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        macro_rules! put {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    m.insert(stringify!($field).to_string(), v.to_string());
                }
            )*};
        }
        put!(
            seed, pair, runs, meta_runs, max_steps, max_mutations, jobs, population, generations,
            crossover_probability, mutation_rate, mutations_per_chromosome, max_depth,
            leaf_probability, constant_probability, constant_range, bk_semantics, selection,
            algorithms, algorithm, input_bits, output_bits
        );
        if let Some(out) = &self.out {
            m.insert("out".into(), out.display().to_string());
        }
        for (flag, key, value) in [
            (self.no_constants, "constants", "false"),
            (self.count_rejected, "count_rejected", "true"),
            (self.paired_seeds, "paired_seeds", "true"),
            (self.random_baseline, "random_baseline", "true"),
        ] {
            if flag {
                m.insert(key.into(), value.into());
            }
        }
        m
    }

    fn settings(&self, command: Command) -> Result<Settings> {
        Settings::resolve(command, self.config.as_deref(), &self.overrides())
    }
}

/// Runs a parsed command line and returns what belongs on standard output.
pub fn run(cli: Cli) -> Result<String> {
    let settings = match &cli.command {
        Cmd::EvolveGp(o) => o.settings(Command::EvolveGp)?,
        Cmd::EvolveTable(o) => o.settings(Command::EvolveTable)?,
        Cmd::Matrix(o) => o.settings(Command::Matrix)?,
        Cmd::Landscape { opts, .. } => opts.settings(Command::Landscape)?,
        Cmd::Replay { opts, .. } => opts.settings(Command::Replay)?,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .context("cannot start worker threads")?;
    pool.install(|| match &cli.command {
        Cmd::EvolveGp(_) => commands::evolve_gp(&settings),
        Cmd::EvolveTable(_) => commands::evolve_table(&settings),
        Cmd::Matrix(_) => commands::matrix(&settings),
        Cmd::Landscape { files, .. } => commands::landscape(&settings, files),
        Cmd::Replay { file, .. } => commands::replay(&settings, file),
    })
}
