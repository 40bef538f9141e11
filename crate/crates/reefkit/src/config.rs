//! Experiment configuration: a flat key-value file with two sections.
//!
//! Grammar (one setting per line):
//!
//! ```text
//! # comment
//! [general]
//! sieve_limit = 1000100
//! rational_mode = true
//! lcm_budget = 1000000
//! stabilization_threshold = 1e-12
//! random_seed = 1729
//! output_dir = out
//!
//! [baselines]
//! <check-name> = <pinned f64>
//! ```
//!
//! Keys outside a section header or unknown keys are rejected with the line
//! number. `to_text` emits the canonical form, and `parse(to_text(c)) == c`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// All knobs an experiment run depends on, plus pinned regression baselines.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Sieve table size; also the memory budget gate for `sieve` runs.
    pub sieve_limit: u64,
    /// Prefer exact rationals wherever the inputs allow it.
    pub rational_mode: bool,
    /// Largest period accepted by exact Carmichael averaging.
    pub lcm_budget: u64,
    /// Successive-difference threshold used when reporting stabilization of
    /// partial sums.
    pub stabilization_threshold: f64,
    /// Seed for every randomized suite; recorded so runs are reproducible.
    pub random_seed: u64,
    /// Directory for emitted reports and pinned baselines.
    pub output_dir: PathBuf,
    /// Pinned check-name -> value baselines (written by `verify --pin`).
    pub pinned_baselines: BTreeMap<String, f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sieve_limit: 1_000_100,
            rational_mode: true,
            lcm_budget: 1_000_000,
            stabilization_threshold: 1e-12,
            random_seed: 1729,
            output_dir: PathBuf::from("out"),
            pinned_baselines: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = ExperimentConfig::default();
        let mut section = String::from("general");
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Parse {
                    line,
                    message: "unterminated section header".into(),
                })?;
                match name {
                    "general" | "baselines" => section = name.to_string(),
                    other => {
                        return Err(ConfigError::Parse {
                            line,
                            message: format!("unknown section `{other}`"),
                        })
                    }
                }
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if section == "baselines" {
                let parsed = value.parse::<f64>().map_err(|_| ConfigError::Parse {
                    line,
                    message: format!("baseline `{key}` is not a real number: `{value}`"),
                })?;
                config.pinned_baselines.insert(key.to_string(), parsed);
                continue;
            }
            match key {
                "sieve_limit" => config.sieve_limit = parse_u64(line, key, value)?,
                "rational_mode" => config.rational_mode = parse_bool(line, key, value)?,
                "lcm_budget" => config.lcm_budget = parse_u64(line, key, value)?,
                "stabilization_threshold" => {
                    config.stabilization_threshold = parse_f64(line, key, value)?
                }
                "random_seed" => config.random_seed = parse_u64(line, key, value)?,
                "output_dir" => config.output_dir = PathBuf::from(value),
                other => {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        Ok(config)
    }

    /// Canonical text form; parsing it reproduces the config exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[general]\n");
        let _ = writeln!(out, "sieve_limit = {}", self.sieve_limit);
        let _ = writeln!(out, "rational_mode = {}", self.rational_mode);
        let _ = writeln!(out, "lcm_budget = {}", self.lcm_budget);
        let _ = writeln!(
            out,
            "stabilization_threshold = {}",
            self.stabilization_threshold
        );
        let _ = writeln!(out, "random_seed = {}", self.random_seed);
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        if !self.pinned_baselines.is_empty() {
            out.push_str("\n[baselines]\n");
            for (key, value) in &self.pinned_baselines {
                let _ = writeln!(out, "{key} = {value}");
            }
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), ConfigError> {
        fs::write(path, self.to_text()).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Merges pinned baselines from `<output_dir>/baselines.cfg` when present.
    pub fn merge_baselines_file(&mut self) -> Result<(), ConfigError> {
        let path = self.baselines_path();
        if path.exists() {
            let pinned = Self::load(&path)?;
            for (k, v) in pinned.pinned_baselines {
                self.pinned_baselines.insert(k, v);
            }
        }
        Ok(())
    }

    pub fn baselines_path(&self) -> PathBuf {
        self.output_dir.join("baselines.cfg")
    }
}

fn parse_u64(line: usize, key: &str, value: &str) -> Result<u64, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("`{key}` expects a natural number, got `{value}`"),
    })
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("`{key}` expects a real number, got `{value}`"),
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::Parse {
            line,
            message: format!("`{key}` expects true or false, got `{value}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn baselines_round_trip() {
        let mut c = ExperimentConfig::default();
        c.pinned_baselines
            .insert("pnt.ratio.N1000000".into(), 0.999586597495633);
        c.pinned_baselines
            .insert("hl.ratio.k1".into(), 0.9943354315);
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let text = "# header\n\n[general]\n  random_seed = 7\n# trailing\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.random_seed, 7);
        assert_eq!(c.sieve_limit, ExperimentConfig::default().sieve_limit);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("[general]\nbogus_key = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");
        let err = ExperimentConfig::parse("rational_mode = maybe\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        let err = ExperimentConfig::parse("[mystery]\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        let err = ExperimentConfig::parse("just some text\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
    }

    proptest! {
        #[test]
        fn arbitrary_configs_round_trip(
            sieve_limit in 1u64..u64::MAX,
            rational_mode in any::<bool>(),
            lcm_budget in 1u64..u64::MAX,
            threshold in prop::num::f64::NORMAL,
            seed in any::<u64>(),
            pins in proptest::collection::btree_map(
                "[a-z][a-z0-9._-]{0,20}",
                prop::num::f64::NORMAL,
                0..5,
            ),
        ) {
            let c = ExperimentConfig {
                sieve_limit,
                rational_mode,
                lcm_budget,
                stabilization_threshold: threshold,
                random_seed: seed,
                output_dir: PathBuf::from("out"),
                pinned_baselines: pins,
            };
            prop_assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
        }
    }
}
