//! Line-oriented JSON files. Serialization uses compact serde_json with
//! struct-declared field order, so repeated exports are byte-identical and
//! export → import → export is stable.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::PipelineError;

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> crate::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| PipelineError::data(format!("creating {}: {e}", parent.display())))?;
    }
    let file = File::create(path)
        .map_err(|e| PipelineError::data(format!("creating {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item)
            .map_err(|e| PipelineError::data(format!("serializing for {}: {e}", path.display())))?;
        writeln!(out, "{line}")
            .map_err(|e| PipelineError::data(format!("writing {}: {e}", path.display())))?;
    }
    out.flush()
        .map_err(|e| PipelineError::data(format!("flushing {}: {e}", path.display())))
}

/// Read every line; parse failures carry the file and 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> crate::Result<Vec<T>> {
    let file = File::open(path)
        .map_err(|e| PipelineError::data(format!("opening {}: {e}", path.display())))?;
    let reader = BufReader::new(file);
    let mut items = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line =
            line.map_err(|e| PipelineError::data(format!("reading {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| {
            PipelineError::data(format!("{}:{}: {e}", path.display(), i + 1))
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_string(path: &Path, contents: &str) -> crate::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| PipelineError::data(format!("creating {}: {e}", parent.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| PipelineError::data(format!("writing {}: {e}", path.display())))
}

pub fn read_string(path: &Path) -> crate::Result<String> {
    fs::read_to_string(path)
        .map_err(|e| PipelineError::data(format!("reading {}: {e}", path.display())))
}
