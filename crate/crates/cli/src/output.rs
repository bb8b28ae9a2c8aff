use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::Format;

/// A CSV artifact as produced by the core writers: `# key=value` metadata
/// lines, one header line, data rows.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub text: String,
}

impl Table {
    pub fn new(name: impl Into<String>, text: String) -> Self {
        Table { name: name.into(), text }
    }

    /// Data rows, excluding metadata and header.
    pub fn rows(&self) -> usize {
        self.text.lines().filter(|l| !l.starts_with('#')).count().saturating_sub(1)
    }

    /// JSON document {"metadata", "columns", "rows"}; numeric cells keep the
    /// exact CSV spelling, non-finite values and labels become strings.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            metadata: BTreeMap<&'a str, &'a str>,
            columns: Vec<&'a str>,
            rows: Vec<Vec<Box<RawValue>>>,
        }
        let mut doc = Doc { metadata: BTreeMap::new(), columns: Vec::new(), rows: Vec::new() };
        let mut header = false;
        for line in self.text.lines() {
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    doc.metadata.insert(k, v);
                }
            } else if !header {
                doc.columns = line.split(',').collect();
                header = true;
            } else {
                let row = line.split(',').map(cell).collect::<Result<Vec<_>>>()?;
                doc.rows.push(row);
            }
        }
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }
}

fn cell(s: &str) -> Result<Box<RawValue>> {
    let finite = s.parse::<f64>().is_ok_and(f64::is_finite);
    let text = if finite && !s.starts_with('+') && !s.starts_with('.') { s.to_string() } else { serde_json::to_string(s)? };
    Ok(RawValue::from_string(text)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub rows: usize,
}

/// One observed residual or check value; `limit` is absent for purely
/// informational entries.
#[derive(Clone, Debug, Serialize)]
pub struct Tolerance {
    pub name: String,
    pub observed: f64,
    pub limit: Option<f64>,
    pub pass: bool,
}

impl Tolerance {
    pub fn info(name: impl Into<String>, observed: f64) -> Self {
        Tolerance { name: name.into(), observed, limit: None, pass: true }
    }

    /// Passes when observed < limit.
    pub fn below(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Tolerance { name: name.into(), observed, limit: Some(limit), pass: observed < limit }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Tolerance { name: name.into(), observed: f64::from(u8::from(ok)), limit: Some(1.0), pass: ok }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub status: &'static str,
    pub exit_code: i32,
    pub error: Option<String>,
    pub config: BTreeMap<String, BTreeMap<String, String>>,
    pub files: Vec<FileEntry>,
    pub wall_time_s: f64,
    pub tolerances: Vec<Tolerance>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Writes every table in the requested format and returns the file list.
pub fn write_tables(dir: &Path, tables: &[Table], format: Format) -> Result<Vec<FileEntry>> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut files = Vec::with_capacity(tables.len());
    for t in tables {
        let (name, body) = match format {
            Format::Csv => (format!("{}.csv", t.name), t.text.clone()),
            Format::Json => (format!("{}.json", t.name), t.to_json()?),
        };
        let path = dir.join(&name);
        std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        files.push(FileEntry { name, rows: t.rows() });
    }
    Ok(files)
}

pub fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(MANIFEST_NAME);
    std::fs::write(&path, serde_json::to_string_pretty(m)? + "\n").with_context(|| format!("cannot write {}", path.display()))
}
