//! Deferred output writing: every file of a run is composed in memory and
//! flushed together, so a failed run never leaves partial files, and
//! identical runs produce byte-identical trees (no timestamps, shortest
//! round-trip float formatting).

use crate::error::CliError;
use std::path::{Path, PathBuf};

pub struct OutputSet {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, content: String) {
        self.files.push((name.to_string(), content));
    }

    pub fn add_json(&mut self, name: &str, value: &serde_json::Value) {
        let mut text = serde_json::to_string_pretty(value).expect("JSON serialization");
        text.push('\n');
        self.add(name, text);
    }

    pub fn flush(&self) -> Result<Vec<String>, CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|err| {
            CliError::Internal(format!("cannot create {}: {err}", self.dir.display()))
        })?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, content) in &self.files {
            let path = self.dir.join(name);
            std::fs::write(&path, content).map_err(|err| {
                CliError::Internal(format!("cannot write {}: {err}", path.display()))
            })?;
            written.push(path.display().to_string());
        }
        Ok(written)
    }
}

/// Shortest round-trip decimal of a float; `Display` for `f64` is exact.
pub fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        // CSV cells must stay parseable; infinities and NaN are spelled out.
        format!("{v:?}")
    }
}

/// Builds a CSV document from a header row and data rows.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}
