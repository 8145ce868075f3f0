//! Tabular output files: CSV with `# key=value` metadata lines above a
//! mandatory header, or JSON with the same content under `meta`, `columns`
//! and `rows`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    /// Format implied by a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(meta: Map<String, Value>, columns: &[&str]) -> Self {
        Self {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(out, "# {k}={v}").unwrap();
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, format: Format) -> io::Result<Self> {
        match format {
            Format::Json => serde_json::from_str(text).map_err(io::Error::other),
            Format::Csv => Self::parse_csv(text),
        }
    }

    fn parse_csv(text: &str) -> io::Result<Self> {
        let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        let mut meta = Map::new();
        let mut lines = text.lines();
        let header = loop {
            let line = lines.next().ok_or_else(|| bad("missing header line".into()))?;
            match line.strip_prefix("# ") {
                Some(entry) => {
                    let (k, v) = entry
                        .split_once('=')
                        .ok_or_else(|| bad(format!("bad metadata line {line:?}")))?;
                    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.into()));
                    meta.insert(k.into(), value);
                }
                None => break line,
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(f64::from_str)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
            if row.len() != columns.len() {
                return Err(bad(format!("row {} has {} cells", i + 1, row.len())));
            }
            rows.push(row);
        }
        Ok(Self { meta, columns, rows })
    }

    /// Reads a file, taking the format from its extension (CSV otherwise).
    pub fn read(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, Format::from_path(path).unwrap_or_default())
    }
}
