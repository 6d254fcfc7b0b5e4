//! Flat `key=value` settings: built-in defaults, then a config file, then
//! command-line overrides.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const FORMAT_VERSION: u32 = 1;

const ALL_TABLE_PRESETS: &str = "B1,B2,B3,B4,B5,B6,B7,B8,B9,B10,B11,B12,B13,B14,B15,B16";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    EvolveGp,
    EvolveTable,
    Matrix,
    Landscape,
    Replay,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EvolveGp => "evolve-gp",
            Command::EvolveTable => "evolve-table",
            Command::Matrix => "matrix",
            Command::Landscape => "landscape",
            Command::Replay => "replay",
        }
    }

    /// Settings the command reads, in echo order, with their defaults. An
    /// empty default marks a required setting.
    fn defaults(self) -> Vec<(&'static str, &'static str)> {
        let engine = [("max_steps", "100"), ("max_mutations", "20"), ("count_rejected", "false")];
        let meta = [
            ("meta_runs", "10"),
            ("generations", "10"),
            ("crossover_probability", "0.9"),
            ("selection", "uniform"),
            ("paired_seeds", "false"),
        ];
        let table = [
            ("population", "10"),
            ("runs", "100"),
            ("mutation_rate", "0.01"),
            ("input_bits", "16"),
            ("output_bits", "8"),
            ("bk_semantics", "shell"),
        ];
        let mut keys = vec![("seed", "0")];
        match self {
            Command::EvolveGp => {
                keys.extend([
                    ("pair", ""),
                    ("population", "50"),
                    ("runs", "500"),
                    ("mutations_per_chromosome", "1"),
                    ("max_depth", "6"),
                    ("leaf_probability", "0.3"),
                    ("constants", "true"),
                    ("constant_probability", "0.25"),
                    ("constant_range", "10"),
                ]);
                keys.extend(meta);
                keys.extend(engine);
            }
            Command::EvolveTable => {
                keys.push(("pair", ""));
                keys.extend(table);
                keys.extend(meta);
                keys.extend(engine);
            }
            Command::Matrix => {
                keys.push(("algorithms", ALL_TABLE_PRESETS));
                keys.extend(table);
                keys.extend(meta);
                keys.extend(engine);
            }
            Command::Landscape => {
                keys = vec![("random_baseline", "false")];
            }
            Command::Replay => {
                keys.extend([("algorithm", ""), ("runs", "100"), ("bk_semantics", "shell")]);
                keys.extend(engine);
            }
        }
        keys
    }
}

/// Normalizes `--max-steps` style names to `max_steps`.
pub fn normalize_key(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('-', "_")
}

/// Parses a flat config file. Blank lines and lines starting with `#` are
/// ignored; later assignments win.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value, got `{line}`", lineno + 1))?;
        out.insert(normalize_key(k), v.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Settings {
    command: Command,
    values: Vec<(&'static str, String)>,
    /// Worker threads; 0 means one per core. Not echoed into artifacts.
    pub jobs: usize,
    /// Output directory. Not echoed into artifacts.
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(
        command: Command,
        config_file: Option<&Path>,
        overrides: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut layered = match config_file {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read config file {}", path.display()))?;
                parse_config(&text).with_context(|| format!("in config file {}", path.display()))?
            }
            None => BTreeMap::new(),
        };
        layered.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));

        let jobs = match layered.remove("jobs") {
            Some(j) => j.parse().map_err(|_| anyhow!("jobs must be a non-negative integer, got `{j}`"))?,
            None => 0,
        };
        let out = layered.remove("out").map(PathBuf::from);

        let defaults = command.defaults();
        if let Some(unknown) = layered.keys().find(|k| !defaults.iter().any(|(d, _)| d == k)) {
            bail!("setting `{unknown}` does not apply to {}", command.name());
        }
        let values = defaults
            .into_iter()
            .map(|(k, d)| (k, layered.get(k).cloned().unwrap_or_else(|| d.to_string())))
            .collect();
        Ok(Self {
            command,
            values,
            jobs,
            out,
        })
    }

    pub fn command(&self) -> Command {
        self.command
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        let v = self
            .values
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| anyhow!("internal: `{key}` is not a {} setting", self.command.name()))?;
        if v.is_empty() {
            bail!("missing required setting `{key}`");
        }
        Ok(v)
    }

    pub fn get<T>(&self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.raw(key)?;
        raw.parse().map_err(|e| anyhow!("invalid value `{raw}` for `{key}`: {e}"))
    }

    pub fn values(&self) -> &[(&'static str, String)] {
        &self.values
    }

    /// `# key=value` preamble identifying the run that produced an artifact.
    pub fn header(&self) -> String {
        let mut out = format!(
            "# tool=nfl-evolve {}\n# format_version={FORMAT_VERSION}\n# command={}\n",
            env!("CARGO_PKG_VERSION"),
            self.command.name()
        );
        for (k, v) in &self.values {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn config_syntax() {
        let m = parse_config("# comment\n\nseed = 4\nmax-steps=50\nseed=5\n").unwrap();
        assert_eq!(m["seed"], "5");
        assert_eq!(m["max_steps"], "50");
        assert!(parse_config("seed 4").is_err());
    }

    #[test]
    fn overrides_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        fs::write(&path, "seed=4\nruns=7\njobs=3\n").unwrap();
        let s = Settings::resolve(Command::EvolveTable, Some(&path), &map(&[("runs", "9")])).unwrap();
        assert_eq!(s.get::<u64>("seed").unwrap(), 4);
        assert_eq!(s.get::<usize>("runs").unwrap(), 9);
        assert_eq!(s.get::<usize>("population").unwrap(), 10);
        assert_eq!(s.jobs, 3);
        assert!(!s.header().contains("jobs"));
    }

    #[test]
    fn command_defaults() {
        let gp = Settings::resolve(Command::EvolveGp, None, &BTreeMap::new()).unwrap();
        assert_eq!(gp.get::<usize>("population").unwrap(), 50);
        assert_eq!(gp.get::<usize>("runs").unwrap(), 500);
        assert_eq!(gp.get::<usize>("meta_runs").unwrap(), 10);
        assert!(gp.raw("pair").is_err());
        let m = Settings::resolve(Command::Matrix, None, &BTreeMap::new()).unwrap();
        assert_eq!(m.raw("algorithms").unwrap().split(',').count(), 16);
    }

    #[test]
    fn foreign_settings_rejected() {
        let err = Settings::resolve(Command::Landscape, None, &map(&[("max_depth", "3")])).unwrap_err();
        assert!(err.to_string().contains("max_depth"));
    }

    #[test]
    fn header_lists_every_setting() {
        let s = Settings::resolve(Command::Replay, None, &map(&[("algorithm", "B3")])).unwrap();
        let h = s.header();
        assert!(h.contains("# command=replay\n"));
        assert!(h.contains("# algorithm=B3\n"));
        assert!(h.contains("# count_rejected=false\n"));
        assert_eq!(h.lines().count(), 3 + s.values().len());
    }
}
