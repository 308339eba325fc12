//! A directory of CSV files plus a `manifest.txt` describing them.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::session::Session;

pub struct Bundle {
    dir: PathBuf,
    label: String,
    meta: Vec<(String, String)>,
    files: Vec<(String, String)>,
}

impl Bundle {
    pub fn create(dir: impl AsRef<Path>, label: &str) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir,
            label: label.to_string(),
            meta: Vec::new(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Adds a `key = value` line to the manifest.
    pub fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    /// Writes `name` and records what its columns mean.
    pub fn file<F>(&mut self, name: &str, columns: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> io::Result<()>,
    {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        let path = self.dir.join(name);
        fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
        self.files.push((name.to_string(), columns.to_string()));
        Ok(())
    }

    /// Writes the manifest and returns the bundle directory.
    pub fn finish(self, session: &Session) -> Result<PathBuf> {
        let cfg = &session.config;
        let mut s = String::new();
        writeln!(s, "bundle = {}", self.label)?;
        writeln!(s, "config_sha256 = {}", cfg.hash())?;
        for line in cfg.canonical().lines() {
            let (k, v) = line.split_once('=').unwrap_or((line, ""));
            writeln!(s, "config.{k} = {v}")?;
        }
        writeln!(s, "basis = {}", session.basis.id())?;
        writeln!(s, "levels = {}", session.coefficients.len())?;
        writeln!(s, "norm = {:.12}", session.coefficients.norm())?;
        for (k, v) in &self.meta {
            writeln!(s, "{k} = {v}")?;
        }
        for (name, columns) in &self.files {
            writeln!(s, "\n[{name}]")?;
            for line in columns.lines() {
                writeln!(s, "{}", line.trim())?;
            }
        }
        let path = self.dir.join("manifest.txt");
        fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
        Ok(self.dir)
    }
}

/// Writes `#` comments, a header and rows of equal-length columns.
pub fn write_columns<W: Write>(
    mut w: W,
    comments: &[String],
    header: &[&str],
    columns: &[&[f64]],
) -> io::Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{}", header.join(","))?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        for (k, col) in columns.iter().enumerate() {
            if k > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{:.11e}", col[i])?;
        }
        writeln!(w)?;
    }
    Ok(())
}
