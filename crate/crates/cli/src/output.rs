//! Tables and JSON documents stamped with tool version, seed and config.
//!
//! CSV files start with `#` comment lines carrying the provenance; everything
//! after them is the numeric payload, which is deterministic for a given
//! config and seed. JSON documents wrap the payload as
//! `{tool, version, command, seed, config, data}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use aperture_forge_core::fmt_sig;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::OutputFormat;
use crate::error::{CliError, CliResult};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: Value,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &'static str, seed: u64, config: &C) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            seed,
            config: serde_json::to_value(config).expect("configs serialise"),
        }
    }

    pub fn wrap<T: Serialize>(&self, data: &T) -> Value {
        json!({
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "data": data,
        })
    }

    fn csv_preamble(&self) -> String {
        format!(
            "# tool: {}\n# version: {}\n# command: {}\n# seed: {}\n# config: {}\n",
            self.tool, self.version, self.command, self.seed, self.config
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Self::Empty, Self::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) => fmt_sig(*v),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Int(v) => json!(v),
            Self::Float(v) if v.is_finite() => json!(v),
            Self::Float(v) => json!(v.to_string()),
            Self::Text(s) => json!(s),
            Self::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Header plus rows, without any provenance lines.
    pub fn csv_payload(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Strips the leading `#` lines of a CSV file, leaving the payload.
pub fn csv_payload_of(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with('#') {
        rest = rest.split_once('\n').map_or("", |(_, tail)| tail);
    }
    rest
}

/// Where results go: files under `--out`, or stdout when no directory is set.
pub struct Sink {
    dir: Option<PathBuf>,
    format: OutputFormat,
    provenance: Provenance,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: OutputFormat, provenance: Provenance) -> CliResult<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
        }
        Ok(Self {
            dir,
            format,
            provenance,
            written: Vec::new(),
        })
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes a table as `<stem>.csv` or `<stem>.json` depending on the format.
    /// On stdout only `primary` tables are printed.
    pub fn table(&mut self, stem: &str, table: &Table, primary: bool) -> CliResult<()> {
        let (ext, text) = match self.format {
            OutputFormat::Csv => ("csv", format!("{}{}", self.provenance.csv_preamble(), table.csv_payload())),
            OutputFormat::Json => ("json", pretty(&self.provenance.wrap(&table.json_rows()))),
        };
        self.emit(&format!("{stem}.{ext}"), &text, primary)
    }

    /// Writes a JSON document regardless of the table format.
    pub fn document<T: Serialize>(&mut self, stem: &str, data: &T, primary: bool) -> CliResult<()> {
        let text = pretty(&self.provenance.wrap(data));
        self.emit(&format!("{stem}.json"), &text, primary)
    }

    /// Writes CSV text produced elsewhere, prefixed with provenance lines.
    pub fn raw_csv(&mut self, stem: &str, payload: &str) -> CliResult<()> {
        let text = format!("{}{}", self.provenance.csv_preamble(), payload);
        self.emit(&format!("{stem}.csv"), &text, false)
    }

    fn emit(&mut self, name: &str, text: &str, primary: bool) -> CliResult<()> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(name);
                write_file(&path, text)?;
                log::info!("wrote {}", path.display());
                self.written.push(path);
            }
            None if primary => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
            }
            None => log::debug!("skipping {name}: no --out directory"),
        }
        Ok(())
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialise");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
