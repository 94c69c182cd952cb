//! Loading sentences from any of the supported file formats.

use std::path::Path;

use spokeud_core::io::{load_manifest, parse_conllu, parse_sheet, BenchmarkManifest};
use spokeud_core::ud::Sentence;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Conllu,
    Sheet,
    Manifest,
}

impl Format {
    pub fn detect(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("jsonl") | Some("json") => Format::Manifest,
            Some("tsv") | Some("sheet") => Format::Sheet,
            _ => Format::Conllu,
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))
}

pub fn manifest(path: &Path) -> Result<BenchmarkManifest, CliError> {
    let m = load_manifest(path).map_err(|e| CliError::input(path, e))?;
    for (label, declared, actual) in m.count_mismatches() {
        tracing::warn!(%label, declared, actual, "category count differs from the manifest header");
    }
    Ok(m)
}

/// Annotated sentences from a CoNLL-U file, a sheet or a manifest's gold trees.
pub fn sentences(path: &Path) -> Result<Vec<Sentence>, CliError> {
    match Format::detect(path) {
        Format::Manifest => Ok(manifest(path)?.gold_sentences()),
        Format::Sheet => parse_sheet(&read(path)?).map_err(|e| CliError::input(path, e)),
        Format::Conllu => parse_conllu(&read(path)?).map_err(|e| CliError::input(path, e)),
    }
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Output {
            path: dir.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

pub fn jsonl<T: serde::Serialize>(items: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("records serialize"));
        out.push('\n');
    }
    out
}
