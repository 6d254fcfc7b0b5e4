use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use nfl_core::duel::matrix_experiment_over;
use nfl_core::gp::{evolve_gp_function, TreeGen};
use nfl_core::landscape::{iid_uniform_peak_fraction, landscape_report, PEAK_LABEL};
use nfl_core::table::{evolve_table_function, MAGIC};
use nfl_core::{
    run_nfl, AlgorithmSpec, DuelSeeding, EngineParams, Evolution, GpObjective, GpParams, GpTree,
    KFlipSemantics, MatrixCell, ObjectiveFunction, ParentSelection, RngStream, TableEaParams,
    TableFunction,
};

use crate::config::Settings;

fn engine(s: &Settings) -> Result<EngineParams> {
    Ok(EngineParams {
        max_steps: s.get("max_steps")?,
        max_mutations: s.get("max_mutations")?,
        count_rejected: s.get("count_rejected")?,
    })
}

fn semantics(s: &Settings) -> Result<KFlipSemantics> {
    match s.raw("bk_semantics")? {
        "shell" => Ok(KFlipSemantics::Shell),
        "per-bit" | "per_bit" => Ok(KFlipSemantics::PerBit),
        other => bail!("invalid value `{other}` for `bk_semantics` (expected shell or per-bit)"),
    }
}

fn seeding(s: &Settings) -> Result<DuelSeeding> {
    Ok(if s.get("paired_seeds")? {
        DuelSeeding::Paired
    } else {
        DuelSeeding::Independent
    })
}

fn preset(name: &str, semantics: KFlipSemantics) -> Result<AlgorithmSpec> {
    Ok(AlgorithmSpec::preset_with(name.trim(), semantics)?)
}

fn algorithm_list(raw: &str, semantics: KFlipSemantics) -> Result<Vec<AlgorithmSpec>> {
    raw.split(',').map(|n| preset(n, semantics)).collect()
}

fn pair(s: &Settings, semantics: KFlipSemantics) -> Result<(AlgorithmSpec, AlgorithmSpec)> {
    let raw = s.raw("pair")?;
    match algorithm_list(raw, semantics)?.as_slice() {
        [a, b] => Ok((a.clone(), b.clone())),
        _ => bail!("`pair` needs exactly two algorithms, got `{raw}`"),
    }
}

fn table_params(s: &Settings) -> Result<TableEaParams> {
    let p = TableEaParams {
        population_size: s.get("population")?,
        generations: s.get("generations")?,
        crossover_probability: s.get("crossover_probability")?,
        mutation_rate: s.get("mutation_rate")?,
        duel_runs: s.get("runs")?,
        meta_runs: s.get("meta_runs")?,
        input_bits: s.get("input_bits")?,
        output_bits: s.get("output_bits")?,
        selection: s.get::<ParentSelection>("selection")?,
        seeding: seeding(s)?,
    };
    p.validate()?;
    Ok(p)
}

fn gp_params(s: &Settings) -> Result<GpParams> {
    let p = GpParams {
        population_size: s.get("population")?,
        generations: s.get("generations")?,
        crossover_probability: s.get("crossover_probability")?,
        mutations_per_chromosome: s.get("mutations_per_chromosome")?,
        max_depth: s.get("max_depth")?,
        duel_runs: s.get("runs")?,
        meta_runs: s.get("meta_runs")?,
        tree_gen: TreeGen {
            leaf_probability: s.get("leaf_probability")?,
            constants: s.get("constants")?,
            constant_probability: s.get("constant_probability")?,
            constant_range: s.get("constant_range")?,
        },
        selection: s.get::<ParentSelection>("selection")?,
        seeding: seeding(s)?,
    };
    p.validate()?;
    Ok(p)
}

fn out_dir(s: &Settings) -> Result<Option<&Path>> {
    match &s.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
            Ok(Some(dir))
        }
        None => Ok(None),
    }
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// `key=value` lines summarizing the best fitness of each meta-run.
fn summary(fitness: &[f64]) -> String {
    let cell = MatrixCell::from_runs(fitness.to_vec());
    let mut sorted = fitness.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        sorted[n / 2 - 1] / 2.0 + sorted[n / 2] / 2.0
    };
    format!(
        "meta_runs={n}\nmean_fitness={}\nstd_fitness={}\nmedian_fitness={median}\nmin_fitness={}\nmax_fitness={}\nnegative_runs={}\n",
        cell.mean,
        cell.std,
        sorted[0],
        sorted[n - 1],
        fitness.iter().filter(|&&f| f < 0.0).count()
    )
}

fn fitness_csv<G>(s: &Settings, runs: &[Evolution<G>]) -> String {
    let mut out = s.header();
    out.push_str("meta_run,fitness,replacements\n");
    for (m, e) in runs.iter().enumerate() {
        writeln!(out, "{m},{},{}", e.fitness, e.replacements).expect("write to string");
    }
    out
}

fn history_csv<G>(s: &Settings, runs: &[Evolution<G>]) -> String {
    let mut out = s.header();
    out.push_str("meta_run,insertion,best_fitness\n");
    for (m, e) in runs.iter().enumerate() {
        for (i, f) in e.history.iter().enumerate() {
            writeln!(out, "{m},{i},{f}").expect("write to string");
        }
    }
    out
}

/// Runs `meta_runs` independent meta-evolutions; meta-run `m` uses stream
/// `seed.child(m)`.
fn meta_runs<G, F>(s: &Settings, label: &str, evolve: F) -> Result<Vec<Evolution<G>>>
where
    G: Send,
    F: Fn(&RngStream) -> nfl_core::Result<Evolution<G>> + Sync,
{
    let count: usize = s.get("meta_runs")?;
    if count == 0 {
        bail!("meta_runs must be positive");
    }
    let root = RngStream::new(s.get("seed")?);
    eprintln!("{label}: {count} meta-runs");
    (0..count)
        .into_par_iter()
        .map(|m| {
            let evo = evolve(&root.child(m as u64))?;
            eprintln!("{label}: meta-run {m} done, fitness {}", evo.fitness);
            Ok(evo)
        })
        .collect()
}

pub fn evolve_gp(s: &Settings) -> Result<String> {
    let gp = gp_params(s)?;
    let engine = engine(s)?;
    let (a, b) = pair(s, KFlipSemantics::Shell)?;
    let label = format!("evolve-gp {},{}", a.name, b.name);
    let runs = meta_runs(s, &label, |rng| evolve_gp_function(&a, &b, &gp, &engine, rng))?;

    let fitness: Vec<f64> = runs.iter().map(|e| e.fitness).collect();
    let summary = summary(&fitness);
    if let Some(dir) = out_dir(s)? {
        for (m, e) in runs.iter().enumerate() {
            let text = format!("{}# meta_run={m}\n# fitness={}\n{}\n", s.header(), e.fitness, e.best);
            write(dir, &format!("run_{m:03}.sexp"), text)?;
        }
        write(dir, "fitness.csv", fitness_csv(s, &runs))?;
        write(dir, "history.csv", history_csv(s, &runs))?;
        write(dir, "summary.txt", format!("{}{summary}", s.header()))?;
    }
    Ok(summary)
}

pub fn evolve_table(s: &Settings) -> Result<String> {
    let ea = table_params(s)?;
    let engine = engine(s)?;
    let (a, b) = pair(s, semantics(s)?)?;
    let label = format!("evolve-table {},{}", a.name, b.name);
    let runs = meta_runs(s, &label, |rng| evolve_table_function(&a, &b, &ea, &engine, rng))?;

    let fitness: Vec<f64> = runs.iter().map(|e| e.fitness).collect();
    let summary = summary(&fitness);
    if let Some(dir) = out_dir(s)? {
        for (m, e) in runs.iter().enumerate() {
            let name = format!("run_{m:03}.nflf");
            write(dir, &name, e.best.to_bytes())?;
            let meta = format!("{}# meta_run={m}\n# fitness={}\n", s.header(), e.fitness);
            write(dir, &format!("{name}.meta"), meta)?;
        }
        write(dir, "fitness.csv", fitness_csv(s, &runs))?;
        write(dir, "history.csv", history_csv(s, &runs))?;
        write(dir, "summary.txt", format!("{}{summary}", s.header()))?;
    }
    Ok(summary)
}

pub fn matrix(s: &Settings) -> Result<String> {
    let ea = table_params(s)?;
    let engine = engine(s)?;
    let algorithms = algorithm_list(s.raw("algorithms")?, semantics(s)?)?;
    let n = algorithms.len();
    eprintln!("matrix: {} pairs x {} meta-runs", n * n.saturating_sub(1), ea.meta_runs);
    let report = matrix_experiment_over(&algorithms, &ea, &engine, &RngStream::new(s.get("seed")?))?;
    let table = report.to_text_table();
    if let Some(dir) = out_dir(s)? {
        write(dir, "matrix.csv", format!("{}{}", s.header(), report.to_csv()))?;
        write(dir, "matrix.txt", format!("{}{table}", s.header()))?;
    }
    Ok(table)
}

pub fn landscape(s: &Settings, files: &[PathBuf]) -> Result<String> {
    let report = landscape_report(files)?;
    let mut csv = s.header();
    writeln!(csv, "# peaks={PEAK_LABEL}").expect("write to string");
    csv.push_str(&report.to_csv());
    if s.get("random_baseline")? {
        let first = &report.entries[0];
        let fraction = iid_uniform_peak_fraction(first.input_bits, first.output_bits);
        let peaks = fraction * (1u64 << first.input_bits) as f64;
        writeln!(csv, "iid_uniform_baseline,{peaks},{fraction}").expect("write to string");
    }
    if let Some(dir) = out_dir(s)? {
        write(dir, "landscape.csv", &csv)?;
    }
    Ok(csv)
}

/// A stored function: an `NFLF` table or an s-expression tree file.
pub enum StoredFunction {
    Table(TableFunction),
    Tree(GpTree),
}

impl StoredFunction {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        if bytes.starts_with(MAGIC) {
            return Ok(Self::Table(
                TableFunction::from_bytes(&bytes).map_err(|e| e.in_file(path))?,
            ));
        }
        let text = String::from_utf8(bytes)
            .map_err(|_| anyhow!("{}: neither a table file nor UTF-8 tree text", path.display()))?;
        let expr: String = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n");
        let tree: GpTree = expr.parse().map_err(|e: nfl_core::Error| e.in_file(path))?;
        Ok(Self::Tree(tree))
    }
}

fn replay_runs<O: ObjectiveFunction>(
    objective: &O,
    alg: &AlgorithmSpec,
    engine: &EngineParams,
    runs: usize,
    seed: u64,
) -> Result<Vec<nfl_core::RunOutcome>> {
    let root = RngStream::new(seed);
    Ok((0..runs)
        .into_par_iter()
        .map(|i| run_nfl(alg, objective, engine, &mut root.child(i as u64)))
        .collect::<nfl_core::Result<_>>()?)
}

pub fn replay(s: &Settings, file: &Path) -> Result<String> {
    let alg = preset(s.raw("algorithm")?, semantics(s)?)?;
    let engine = engine(s)?;
    let runs: usize = s.get("runs")?;
    if runs == 0 {
        bail!("runs must be positive");
    }
    let seed = s.get("seed")?;
    let outcomes = match StoredFunction::load(file)? {
        StoredFunction::Table(t) => replay_runs(&t, &alg, &engine, runs, seed)?,
        StoredFunction::Tree(t) => replay_runs(&GpObjective::new(&t), &alg, &engine, runs, seed)?,
    };
    let mut csv = s.header();
    csv.push_str("run,best_value,distinct_visited,reinit_count,evaluations\n");
    for (i, o) in outcomes.iter().enumerate() {
        writeln!(
            csv,
            "{i},{},{},{},{}",
            o.best_value, o.distinct_visited, o.reinit_count, o.evaluations
        )
        .expect("write to string");
    }
    let mean = outcomes.iter().fold(0.0, |acc, o| acc + o.best_value) / runs as f64;
    eprintln!("replay {}: mean best value {mean}", alg.name);
    if let Some(dir) = out_dir(s)? {
        write(dir, "replay.csv", &csv)?;
    }
    Ok(csv)
}
