//! Artifacts produced by a command and the single writer that puts them on disk.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Csv,
    Svg,
    /// Written regardless of the requested format.
    Always,
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub kind: Kind,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn csv(name: impl Into<String>, table: Table) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Csv,
            bytes: table.finish().into_bytes(),
        }
    }

    /// CSV produced elsewhere, e.g. by the library's own writers.
    pub fn csv_text(name: impl Into<String>, text: Vec<u8>) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Csv,
            bytes: text,
        }
    }

    pub fn svg(name: impl Into<String>, doc: String) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Svg,
            bytes: doc.into_bytes(),
        }
    }

    pub fn other(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Always,
            bytes,
        }
    }

    fn wanted(&self, format: Format) -> bool {
        match self.kind {
            Kind::Csv => format.csv(),
            Kind::Svg => format.svg(),
            Kind::Always => true,
        }
    }
}

/// Shortest text that parses back to exactly `v`, in scientific notation
/// for very small or large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// CSV text with a fixed header; numbers are written with [`num`].
#[derive(Debug, Clone)]
pub struct Table {
    columns: usize,
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            columns: header.len(),
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        assert_eq!(
            values.len(),
            self.columns,
            "row width must match the header"
        );
        let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Everything a command produced.
#[derive(Debug, Default)]
pub struct Report {
    pub artifacts: Vec<Artifact>,
    /// Derived quantities echoed in the manifest's `[results]` section.
    pub results: Vec<(String, String)>,
    /// Grid points or sweep members that could not be computed.
    pub failures: Vec<String>,
}

impl Report {
    pub fn result(&mut self, key: impl Into<String>, value: f64) {
        self.results.push((key.into(), num(value)));
    }

    pub fn note(&mut self, key: impl Into<String>, text: &str) {
        self.results.push((key.into(), text.to_string()));
    }

    pub fn push(&mut self, artifact: Artifact) {
        self.artifacts.push(artifact);
    }
}

/// `key = value` text that `parse_config` reads back: the command, format
/// and every resolved parameter, then the results.
pub fn manifest(cfg: &RunConfig, report: &Report) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "command = {}", cfg.command);
    let _ = writeln!(text, "format = {}", cfg.format.name());
    for (key, value) in &cfg.params {
        let _ = writeln!(text, "{key} = {value}");
    }
    let _ = writeln!(text, "\n[results]");
    for (key, value) in &report.results {
        let _ = writeln!(text, "{key} = {value}");
    }
    let _ = writeln!(text, "failed_points = {}", report.failures.len());
    text
}

/// Writes the artifacts matching the requested format plus `manifest.txt`.
/// Returns the paths written, in order.
pub fn write_all(cfg: &RunConfig, report: &Report) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for artifact in report.artifacts.iter().filter(|a| a.wanted(cfg.format)) {
        written.push(write_file(dir, &artifact.name, &artifact.bytes)?);
    }
    written.push(write_file(
        dir,
        "manifest.txt",
        manifest(cfg, report).as_bytes(),
    )?);
    Ok(written)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// File-name fragment for a parameter value, e.g. `0.05` or `1e-5`.
pub fn tag(value: f64) -> String {
    let plain = value.to_string();
    let sci = format!("{value:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn table_round_trips_floats() {
        let mut t = Table::new(&["a", "b"]);
        t.row(&[0.1 + 0.2, 1e-300]);
        let text = t.finish();
        let row: Vec<f64> = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(row, vec![0.1 + 0.2, 1e-300]);
    }

    #[test]
    fn manifest_reloads_as_config() {
        let mut cfg = RunConfig::defaults(Command::BecCurve, PathBuf::from("out"));
        cfg.set("points", "17").unwrap();
        let mut report = Report::default();
        report.result("critical_number_x1", 1.6449);
        let text = manifest(&cfg, &report);
        let back = crate::config::parse_config(&text, Path::new("manifest.txt"), Command::BecCurve)
            .unwrap();
        assert!(back
            .params
            .contains(&("points".to_string(), "17".to_string())));
        assert_eq!(back.params.len(), Command::BecCurve.keys().len());
        assert_eq!(back.format, Some(Format::Both));
    }

    #[test]
    fn numbers_round_trip_in_both_notations() {
        for v in [
            0.0,
            -0.0,
            1e-24,
            6.557529699662502e-24,
            0.05,
            2513.0,
            3.2e15,
            -7.1e-5,
            f64::MAX,
            f64::MIN_POSITIVE,
        ] {
            let text = num(v);
            assert_eq!(
                text.parse::<f64>().unwrap().to_bits(),
                v.to_bits(),
                "{text}"
            );
            assert!(text.len() < 26, "{text}");
        }
        assert_eq!(num(2513.0), "2513");
        assert_eq!(num(1e-24), "1e-24");
    }

    #[test]
    fn tags_are_short() {
        assert_eq!(tag(0.05), "0.05");
        assert_eq!(tag(1e-5), "1e-5");
        assert_eq!(tag(1.0), "1");
    }
}
