//! JSON-lines benchmark manifest.
//!
//! Each line is one entry:
//! `{"sentence_id", "category", "tokens": [{"form", "lang_tag"}], "gold_conllu"}`.
//! An optional first line `{"header": {"name", "declared_counts"}}` declares
//! the expected number of sentences per category.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::conllu::{emit_conllu, parse_conllu, ConlluError};
use crate::ud::{Category, LangTag, NodeId, Sentence, Token};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("reading manifest: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("unknown category {label:?}")]
    UnknownCategory { label: String },
    #[error("duplicate sentence id {id:?}")]
    DuplicateSentenceId { id: String },
    #[error("gold annotation of {id:?}: {source}")]
    Gold { id: String, source: ConlluError },
    #[error("gold annotation of {id:?} holds {count} sentences, expected 1")]
    GoldSentenceCount { id: String, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawToken {
    pub form: String,
    #[serde(default)]
    pub lang_tag: LangTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub sentence_id: String,
    pub category: Category,
    pub tokens: Vec<RawToken>,
    /// Gold tree; may hold split and dotted nodes that the raw tokens lack.
    pub gold: Option<Sentence>,
}

impl ManifestEntry {
    /// The tokenized input sentence, numbered 1..n with original indices.
    pub fn input_sentence(&self) -> Sentence {
        let tokens = self
            .tokens
            .iter()
            .enumerate()
            .map(|(i, raw)| {
                let n = i as u32 + 1;
                let mut t = Token::new(NodeId::int(n), raw.form.clone());
                t.orig_token_index = Some(n);
                t.lang_tag = raw.lang_tag;
                t
            })
            .collect();
        let mut s = Sentence::new(self.sentence_id.clone(), tokens);
        s.category = Some(self.category);
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestHeader {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub declared_counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchmarkManifest {
    pub header: Option<ManifestHeader>,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
struct HeaderLine {
    header: ManifestHeader,
}

#[derive(Serialize, Deserialize)]
struct EntryLine {
    sentence_id: String,
    category: String,
    tokens: Vec<RawToken>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold_conllu: Option<String>,
}

impl BenchmarkManifest {
    /// Sentences per category, in report order.
    pub fn distribution(&self) -> BTreeMap<Category, usize> {
        let mut counts = BTreeMap::new();
        for e in &self.entries {
            *counts.entry(e.category).or_insert(0) += 1;
        }
        counts
    }

    /// Categories whose actual count differs from the header's declared count,
    /// as `(label, declared, actual)`.
    pub fn count_mismatches(&self) -> Vec<(String, usize, usize)> {
        let Some(header) = &self.header else {
            return Vec::new();
        };
        let actual = self.distribution();
        let mut labels: Vec<String> = header.declared_counts.keys().cloned().collect();
        labels.extend(actual.keys().map(|c| c.label().to_string()));
        labels.sort();
        labels.dedup();
        labels
            .into_iter()
            .filter_map(|label| {
                let declared = header.declared_counts.get(&label).copied().unwrap_or(0);
                let got = label
                    .parse::<Category>()
                    .ok()
                    .and_then(|c| actual.get(&c).copied())
                    .unwrap_or(0);
                (declared != got).then_some((label, declared, got))
            })
            .collect()
    }

    pub fn gold_sentences(&self) -> Vec<Sentence> {
        self.entries.iter().filter_map(|e| e.gold.clone()).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        if let Some(h) = &self.header {
            let v = serde_json::json!({ "header": h });
            out.push_str(&v.to_string());
            out.push('\n');
        }
        for e in &self.entries {
            let line = EntryLine {
                sentence_id: e.sentence_id.clone(),
                category: e.category.label().to_string(),
                tokens: e.tokens.clone(),
                gold_conllu: e.gold.as_ref().map(|g| emit_conllu(std::slice::from_ref(g))),
            };
            out.push_str(&serde_json::to_string(&line).expect("manifest entries serialize"));
            out.push('\n');
        }
        out
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<BenchmarkManifest, ManifestError> {
    parse_manifest(&std::fs::read_to_string(path)?)
}

pub fn parse_manifest(text: &str) -> Result<BenchmarkManifest, ManifestError> {
    let mut manifest = BenchmarkManifest::default();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| ManifestError::Json {
            line: line_no,
            message: e.to_string(),
        })?;
        if value.get("header").is_some() && manifest.entries.is_empty() && manifest.header.is_none() {
            let h: HeaderLine = serde_json::from_value(value).map_err(|e| ManifestError::Json {
                line: line_no,
                message: e.to_string(),
            })?;
            manifest.header = Some(h.header);
            continue;
        }
        let raw: EntryLine = serde_json::from_value(value).map_err(|e| ManifestError::Json {
            line: line_no,
            message: e.to_string(),
        })?;
        let category = raw
            .category
            .parse::<Category>()
            .map_err(|_| ManifestError::UnknownCategory {
                label: raw.category.clone(),
            })?;
        if !seen.insert(raw.sentence_id.clone()) {
            return Err(ManifestError::DuplicateSentenceId { id: raw.sentence_id });
        }
        let gold = match raw.gold_conllu.as_deref().filter(|g| !g.trim().is_empty()) {
            Some(text) => {
                let mut parsed = parse_conllu(text).map_err(|source| ManifestError::Gold {
                    id: raw.sentence_id.clone(),
                    source,
                })?;
                if parsed.len() != 1 {
                    return Err(ManifestError::GoldSentenceCount {
                        id: raw.sentence_id,
                        count: parsed.len(),
                    });
                }
                let mut g = parsed.remove(0);
                g.sentence_id = raw.sentence_id.clone();
                g.category = Some(category);
                Some(g)
            }
            None => None,
        };
        manifest.entries.push(ManifestEntry {
            sentence_id: raw.sentence_id,
            category,
            tokens: raw.tokens,
            gold,
        });
    }
    Ok(manifest)
}
