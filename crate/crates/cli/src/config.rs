//! Run configuration: per-command key tables, flat `key = value` files and
//! command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

/// A configurable parameter with its default (empty means unset).
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

impl Key {
    pub const fn new(name: &'static str, default: &'static str, help: &'static str) -> Self {
        Self {
            name,
            default,
            help,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`, got {text:?}")]
    Syntax {
        path: PathBuf,
        line: usize,
        text: String,
    },
    #[error("{path}:{line}: unknown key `{key}` for command {command}")]
    UnknownKey {
        path: PathBuf,
        line: usize,
        key: String,
        command: Command,
    },
    #[error("{path}:{line}: file is for command `{found}`, not `{expected}`")]
    WrongCommand {
        path: PathBuf,
        line: usize,
        found: String,
        expected: Command,
    },
    #[error("{path}:{line}: unexpected section {section}")]
    Section {
        path: PathBuf,
        line: usize,
        section: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parameter `{key}`: cannot parse {value:?} as {expected}")]
    Value {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("parameter `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown output format {0:?} (expected csv, svg or both)")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    BecCurve,
    LaserCurve,
    Compare,
    Cavity,
    Gpe,
    KsFit,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::BecCurve,
        Command::LaserCurve,
        Command::Compare,
        Command::Cavity,
        Command::Gpe,
        Command::KsFit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::BecCurve => "bec-curve",
            Command::LaserCurve => "laser-curve",
            Command::Compare => "compare",
            Command::Cavity => "cavity",
            Command::Gpe => "gpe",
            Command::KsFit => "ks-fit",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::BecCurve => {
                "Ground-state population versus total number in a 2D harmonic trap"
            }
            Command::LaserCurve => {
                "Steady-state photon number versus pump for a single-mode microlaser"
            }
            Command::Compare => "Microlaser and condensate curves at matched parameters",
            Command::Cavity => {
                "Photon mass, trap frequency and critical number of a curved-mirror cavity"
            }
            Command::Gpe => "Driven-dissipative Gross-Pitaevskii evolution of the photon field",
            Command::KsFit => {
                "Temperature and zero-phonon line from absorption and fluorescence spectra"
            }
        }
    }

    pub fn keys(self) -> &'static [Key] {
        use crate::commands::*;
        match self {
            Command::BecCurve => bec::KEYS,
            Command::LaserCurve => laser::KEYS,
            Command::Compare => compare::KEYS,
            Command::Cavity => cavity::KEYS,
            Command::Gpe => gpe::KEYS,
            Command::KsFit => ks::KEYS,
        }
    }

    pub fn has_key(self, key: &str) -> bool {
        self.keys().iter().any(|k| k.name == key)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    Svg,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        self != Format::Svg
    }
    pub fn svg(self) -> bool {
        self != Format::Csv
    }
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Svg => "svg",
            Format::Both => "both",
        }
    }
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            "both" => Ok(Format::Both),
            other => Err(ConfigError::Format(other.to_string())),
        }
    }
}

/// Settings read from a config file: parameters plus an optional format.
#[derive(Debug, Default, PartialEq)]
pub struct FileSettings {
    pub params: Vec<(String, String)>,
    pub format: Option<Format>,
}

/// Parses a flat `key = value` file for `command`. Blank lines and `#`
/// comments are skipped; reading stops at a `[results]` section so a
/// manifest can be fed back in unchanged.
pub fn parse_config(
    text: &str,
    path: &Path,
    command: Command,
) -> Result<FileSettings, ConfigError> {
    let mut out = FileSettings::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.starts_with('[') {
            if trimmed == "[results]" {
                break;
            }
            return Err(ConfigError::Section {
                path: path.to_path_buf(),
                line,
                section: trimmed.to_string(),
            });
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax {
                path: path.to_path_buf(),
                line,
                text: trimmed.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "command" if value != command.name() => {
                return Err(ConfigError::WrongCommand {
                    path: path.to_path_buf(),
                    line,
                    found: value.to_string(),
                    expected: command,
                })
            }
            "command" => {}
            "format" => out.format = Some(value.parse()?),
            _ if command.has_key(key) => out.params.push((key.to_string(), value.to_string())),
            _ => {
                return Err(ConfigError::UnknownKey {
                    path: path.to_path_buf(),
                    line,
                    key: key.to_string(),
                    command,
                })
            }
        }
    }
    Ok(out)
}

pub fn load_config(path: &Path, command: Command) -> Result<FileSettings, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path, command)
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, String>,
    pub format: Format,
    pub output_dir: PathBuf,
    pub jobs: usize,
}

impl RunConfig {
    /// Defaults for every key of `command`.
    pub fn defaults(command: Command, output_dir: PathBuf) -> Self {
        let params = command
            .keys()
            .iter()
            .map(|k| (k.name.to_string(), k.default.to_string()))
            .collect();
        Self {
            command,
            params,
            format: Format::default(),
            output_dir,
            jobs: 0,
        }
    }

    /// Sets `key`, rejecting keys the command does not know.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !self.command.has_key(key) {
            return Err(ConfigError::Invalid {
                key: key.to_string(),
                reason: format!("not a parameter of {}", self.command),
            });
        }
        self.params
            .insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> &str {
        self.params
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("`{key}` is not a parameter of {}", self.command))
    }

    /// `None` when the value is empty.
    pub fn optional(&self, key: &str) -> Option<&str> {
        Some(self.raw(key)).filter(|v| !v.is_empty())
    }

    pub fn parse<T: FromStr>(&self, key: &str, expected: &'static str) -> Result<T, ConfigError> {
        let value = self.raw(key);
        value.parse().map_err(|_| ConfigError::Value {
            key: key.to_string(),
            value: value.to_string(),
            expected,
        })
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.parse(key, "a number")?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.invalid(key, "must be finite"))
        }
    }

    pub fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.f64(key)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.invalid(key, "must be positive"))
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.parse(key, "a non-negative integer")
    }

    pub fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.raw(key) {
            "true" | "on" | "yes" | "1" => Ok(true),
            "false" | "off" | "no" | "0" => Ok(false),
            other => Err(ConfigError::Value {
                key: key.to_string(),
                value: other.to_string(),
                expected: "true or false",
            }),
        }
    }

    /// Comma-separated list of finite numbers.
    pub fn list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let values = self
            .raw(key)
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ConfigError::Value {
                        key: key.to_string(),
                        value: s.trim().to_string(),
                        expected: "a finite number",
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(self.invalid(key, "list is empty"));
        }
        Ok(values)
    }

    /// Log-spaced grid from three keys: minimum, maximum and point count.
    pub fn log_grid(&self, min: &str, max: &str, points: &str) -> Result<Vec<f64>, ConfigError> {
        let (lo, hi) = (self.positive(min)?, self.positive(max)?);
        let n = self.usize(points)?;
        if hi <= lo {
            return Err(self.invalid(max, format!("must exceed {min} = {lo}")));
        }
        if n < 3 {
            return Err(self.invalid(points, "need at least 3 points"));
        }
        Ok(log_grid(lo, hi, n))
    }

    pub fn invalid(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

/// `n` points evenly spaced in `ln` between `lo` and `hi`, end points exact.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}
