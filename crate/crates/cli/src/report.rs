//! Report files: a JSON summary with the timestamp segregated into a
//! metadata block, CSV traces with fixed per-subcommand columns, and
//! optional field dumps.

use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub created_unix_seconds: u64,
    pub tool_version: String,
    pub core_version: String,
}

impl Metadata {
    pub fn now() -> Metadata {
        Metadata {
            created_unix_seconds: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: hardycrit_version(),
        }
    }
}

fn hardycrit_version() -> String {
    // The core crate version travels with this binary's lockfile.
    env!("CARGO_PKG_VERSION").to_string()
}

/// Identical configs must produce byte-identical summaries apart from this
/// metadata block, so everything time-dependent lives here and the report
/// value uses sorted-key JSON maps throughout.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub metadata: Metadata,
    pub report: serde_json::Value,
}

pub fn write_summary(dir: &Path, report: serde_json::Value) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let summary = Summary {
        metadata: Metadata::now(),
        report,
    };
    let mut file = fs::File::create(dir.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut file, &summary)?;
    file.write_all(b"\n")
}

/// Fixed-column CSV with floats at 17 significant digits.
pub struct CsvTrace {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTrace {
    pub fn new(header: &[&'static str]) -> CsvTrace {
        CsvTrace {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: &[CsvCell]) {
        assert_eq!(cells.len(), self.header.len(), "column count mismatch");
        self.rows
            .push(cells.iter().map(|c| c.format()).collect());
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut file = fs::File::create(path)?;
        writeln!(file, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(file, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub enum CsvCell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl CsvCell {
    fn format(&self) -> String {
        match self {
            CsvCell::Int(v) => v.to_string(),
            CsvCell::Float(v) => format!("{v:.16e}"),
            CsvCell::Text(s) => s.clone(),
        }
    }
}

pub fn write_field(
    dir: &Path,
    name: &str,
    field: &hardycrit::Field,
) -> std::io::Result<()> {
    let fields_dir = dir.join("fields");
    fs::create_dir_all(&fields_dir)?;
    let file = fs::File::create(fields_dir.join(format!("{name}.json")))?;
    serde_json::to_writer_pretty(file, field)?;
    Ok(())
}
