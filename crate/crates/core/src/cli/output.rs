//! Headered CSV tables and their run manifests.
//!
//! Reals are written with 17 significant digits so that reading a table back
//! reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    fn write(&self, out: &mut String) {
        use std::fmt::Write;
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Real(v) => write!(out, "{v:.16e}").unwrap(),
        }
    }
}

/// Formats one real the way tables do.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a table to bytes.
pub fn render_table(columns: &[&str], rows: &[Vec<Cell>]) -> Vec<u8> {
    let mut out = String::with_capacity(32 * rows.len() * columns.len().max(1));
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        for (k, cell) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            cell.write(&mut out);
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// A table read back from disk; every cell as `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|reason| CliError::Format { path: path.to_owned(), reason })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty file")?;
        let columns: Vec<String> = header.split(',').map(|s| s.trim().to_owned()).collect();
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| format!("line {}: {e}", k + 2)))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(format!("line {}: {} cells, header has {}", k + 2, row.len(), columns.len()));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

/// Provenance record written next to each data file as
/// `<file>.manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub version: String,
    pub wall_time_seconds: f64,
    pub output: OutputDigest,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    data.with_file_name(name)
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Format { path: path.to_owned(), reason: e.to_string() })
    }

    /// Re-hashes the data file this manifest sits next to.
    pub fn verify(&self, data: &Path) -> Result<bool, CliError> {
        let bytes = fs::read(data).map_err(|e| CliError::io(data, e))?;
        Ok(sha256_hex(&bytes) == self.output.sha256)
    }
}

/// Writes the data file and its manifest.
pub fn write_with_manifest(
    path: &Path,
    columns: &[&str],
    rows: &[Vec<Cell>],
    mut manifest: RunManifest,
) -> Result<RunManifest, CliError> {
    let bytes = render_table(columns, rows);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, &bytes).map_err(|e| CliError::io(path, e))?;
    manifest.output = OutputDigest {
        file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        sha256: sha256_hex(&bytes),
        rows: rows.len(),
    };
    let mpath = manifest_path(path);
    let file = fs::File::create(&mpath).map_err(|e| CliError::io(&mpath, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &manifest)
        .map_err(|e| CliError::Format { path: mpath.clone(), reason: e.to_string() })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| CliError::io(&mpath, e))?;
    Ok(manifest)
}
