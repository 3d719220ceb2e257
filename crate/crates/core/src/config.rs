//! Line-oriented `key = value` configuration files.
//!
//! `#` starts a comment, blank lines are skipped, keys may repeat (bond
//! lists), and values keep their raw text for typed access. Errors carry
//! the 1-based line number.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parsed config file: ordered entries plus lookup helpers.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: Vec<ConfigEntry>,
}

/// Inclusive numeric grid given as `start stop step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    /// Points start, start+step, ... up to and including stop when the span
    /// is an (approximate) integer multiple of step; never overshoots stop.
    pub fn points(&self) -> Vec<f64> {
        if self.step == 0.0 || (self.stop - self.start).abs() < 1e-15 {
            return vec![self.start];
        }
        let span = (self.stop - self.start) / self.step;
        let n = (span + 1e-9).floor() as i64;
        (0..=n.max(0))
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let stripped = stripped.trim();
            if stripped.is_empty() {
                continue;
            }
            let eq = stripped.find('=').ok_or(Error::Config {
                line,
                msg: format!("expected 'key = value', got '{stripped}'"),
            })?;
            let key = stripped[..eq].trim();
            let value = stripped[eq + 1..].trim();
            if key.is_empty() {
                return Err(Error::Config { line, msg: "empty key".into() });
            }
            entries.push(ConfigEntry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn find(&self, key: &str) -> Option<&ConfigEntry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.find(key).map(|e| e.value.as_str())
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a ConfigEntry> + 'a {
        self.entries.iter().filter(move |e| e.key == key)
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.find(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| Error::Config {
                line: e.line,
                msg: format!("'{}' is not a number for key '{key}'", e.value),
            }),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.find(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| Error::Config {
                line: e.line,
                msg: format!("'{}' is not an integer for key '{key}'", e.value),
            }),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.get_u64(key, default as u64)? as usize)
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.find(key) {
            None => Ok(default),
            Some(e) => match e.value.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(Error::Config {
                    line: e.line,
                    msg: format!("'{other}' is not a boolean for key '{key}'"),
                }),
            },
        }
    }

    /// `start stop step` triple.
    pub fn get_grid(&self, key: &str, default: Grid) -> Result<Grid> {
        match self.find(key) {
            None => Ok(default),
            Some(e) => {
                let parts: Vec<&str> = e.value.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(Error::Config {
                        line: e.line,
                        msg: format!("grid '{key}' needs 'start stop step', got '{}'", e.value),
                    });
                }
                let nums: Vec<f64> = parts
                    .iter()
                    .map(|p| {
                        p.parse().map_err(|_| Error::Config {
                            line: e.line,
                            msg: format!("'{p}' is not a number in grid '{key}'"),
                        })
                    })
                    .collect::<Result<_>>()?;
                let grid = Grid { start: nums[0], stop: nums[1], step: nums[2] };
                if grid.step < 0.0 || (grid.stop < grid.start && grid.step > 0.0) {
                    return Err(Error::Config {
                        line: e.line,
                        msg: format!("grid '{key}' is not increasing"),
                    });
                }
                Ok(grid)
            }
        }
    }

    /// Rejects keys outside the allowed set, reporting the first offender
    /// with its line number.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
        for e in &self.entries {
            if !allowed.contains(e.key.as_str()) {
                return Err(Error::Config {
                    line: e.line,
                    msg: format!(
                        "unknown key '{}' (expected one of: {})",
                        e.key,
                        allowed.iter().copied().collect::<Vec<_>>().join(", ")
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Lattice geometry file: `sites = N` plus repeated `bond = i j NAME` lines
/// (1-based sites) with coupling names like J1, J2. An optional
/// `ratio J2/J1 = x` pins a single coupling ratio.
#[derive(Debug, Clone)]
pub struct LatticeFile {
    pub n_sites: usize,
    /// 0-based site pairs with their coupling name.
    pub bonds: Vec<(usize, usize, String)>,
    /// (numerator, denominator, value) from `ratio A/B = x` lines.
    pub ratios: Vec<(String, String, f64)>,
}

impl LatticeFile {
    pub fn parse(text: &str) -> Result<Self> {
        let config = Config::parse(text)?;
        config.check_keys(&["sites", "bond", "ratio J2/J1", "ratio J3/J1"])?;
        let n_sites = config.get_usize("sites", 0)?;
        if n_sites == 0 {
            return Err(Error::ConfigGeneral("lattice file needs 'sites = N'".into()));
        }
        let mut bonds = Vec::new();
        for e in config.all("bond") {
            let parts: Vec<&str> = e.value.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Config {
                    line: e.line,
                    msg: format!("bond needs 'i j NAME', got '{}'", e.value),
                });
            }
            let i: usize = parts[0].parse().map_err(|_| Error::Config {
                line: e.line,
                msg: format!("bad site '{}'", parts[0]),
            })?;
            let j: usize = parts[1].parse().map_err(|_| Error::Config {
                line: e.line,
                msg: format!("bad site '{}'", parts[1]),
            })?;
            if i == 0 || j == 0 || i > n_sites || j > n_sites {
                return Err(Error::Config {
                    line: e.line,
                    msg: format!("bond sites must lie in 1..={n_sites}"),
                });
            }
            bonds.push((i - 1, j - 1, parts[2].to_string()));
        }
        if bonds.is_empty() {
            return Err(Error::ConfigGeneral("lattice file declares no bonds".into()));
        }
        let mut ratios = Vec::new();
        for key in ["ratio J2/J1", "ratio J3/J1"] {
            for e in config.all(key) {
                let value: f64 = e.value.parse().map_err(|_| Error::Config {
                    line: e.line,
                    msg: format!("'{}' is not a number", e.value),
                })?;
                let spec = key.trim_start_matches("ratio ").to_string();
                let (num, den) = spec.split_once('/').expect("static key format");
                ratios.push((num.to_string(), den.to_string(), value));
            }
        }
        Ok(Self { n_sites, bonds, ratios })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Bonds carrying the given coupling name.
    pub fn bonds_named(&self, name: &str) -> Vec<(usize, usize)> {
        self.bonds
            .iter()
            .filter(|(_, _, n)| n == name)
            .map(|&(i, j, _)| (i.min(j), i.max(j)))
            .collect()
    }
}
