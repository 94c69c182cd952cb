//! The 15-column sheet table produced by the verifier stage.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ud::{canonical_deprel, Head, NodeId, Sentence, Token, Upos};

pub const SHEET_COLUMNS: [&str; 15] = [
    "sentence_id",
    "orig_token_index",
    "split_token",
    "ID",
    "sheet_ID",
    "FORM",
    "LEMMA",
    "UPOS",
    "HEAD_ID",
    "sheet_HEAD_ID",
    "HEAD",
    "DEPREL",
    "final_confidence",
    "penalty",
    "adjudication_note",
];

/// Confidence key under which the sheet's `final_confidence` is stored on a token.
pub const FINAL_CONFIDENCE: &str = "final";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheetError {
    #[error("sheet header does not match the expected 15 columns: {found:?}")]
    HeaderMismatch { found: String },
    #[error("row {row}: HEAD text does not match the FORM of the head row")]
    InconsistentHeadForm { row: usize },
    #[error("row {row}: sheet_HEAD_ID does not point at the row named by HEAD_ID")]
    InconsistentHeadId { row: usize },
    #[error("row {row}: sheet_IDs must run 1..N within a sentence")]
    NonContiguousSheetId { row: usize },
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
}

/// One row of the sheet, in column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetRow {
    pub sentence_id: String,
    pub orig_token_index: Option<u32>,
    pub split_token: String,
    #[serde(rename = "ID")]
    pub id: NodeId,
    #[serde(rename = "sheet_ID")]
    pub sheet_id: u32,
    #[serde(rename = "FORM")]
    pub form: String,
    #[serde(rename = "LEMMA")]
    pub lemma: String,
    #[serde(rename = "UPOS")]
    pub upos: String,
    #[serde(rename = "HEAD_ID")]
    pub head_id: Option<Head>,
    #[serde(rename = "sheet_HEAD_ID")]
    pub sheet_head_id: Option<u32>,
    #[serde(rename = "HEAD")]
    pub head: String,
    #[serde(rename = "DEPREL")]
    pub deprel: String,
    pub final_confidence: Option<f64>,
    pub penalty: f64,
    pub adjudication_note: String,
}

impl SheetRow {
    fn to_line(&self) -> String {
        let opt_u32 = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            clean(&self.sentence_id),
            opt_u32(self.orig_token_index),
            clean(&self.split_token),
            self.id.to_string(),
            self.sheet_id.to_string(),
            clean(&self.form),
            clean(&self.lemma),
            self.upos.clone(),
            self.head_id.map(|h| h.to_string()).unwrap_or_default(),
            opt_u32(self.sheet_head_id),
            clean(&self.head),
            clean(&self.deprel),
            self.final_confidence.map(|c| format!("{c:.3}")).unwrap_or_default(),
            format!("{:.3}", self.penalty),
            clean(&self.adjudication_note),
        ]
        .join("\t")
    }
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Builds sheet rows for one sentence, numbering rows 1..N in token order.
pub fn sheet_rows(sentence: &Sentence) -> Vec<SheetRow> {
    let comps = sentence.mwe_components();
    let sheet_of: HashMap<NodeId, u32> = sentence
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id, i as u32 + 1))
        .collect();
    let form_of = |t: &Token| if comps.contains(&t.id) { String::new() } else { t.form.clone() };
    sentence
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (sheet_head_id, head) = match t.head {
                Some(Head::Root) => (Some(0), "root".to_string()),
                Some(Head::Node(h)) => match sentence.get(h) {
                    Some(ht) => (sheet_of.get(&h).copied(), form_of(ht)),
                    None => (None, String::new()),
                },
                None => (None, String::new()),
            };
            SheetRow {
                sentence_id: sentence.sentence_id.clone(),
                orig_token_index: t.orig_token_index,
                split_token: t.form.clone(),
                id: t.id,
                sheet_id: i as u32 + 1,
                form: form_of(t),
                lemma: t.lemma.clone().unwrap_or_default(),
                upos: t.upos.map(|u| u.as_str().to_string()).unwrap_or_default(),
                head_id: t.head,
                sheet_head_id,
                head,
                deprel: t.deprel.clone().unwrap_or_default(),
                final_confidence: t.confidences.get(FINAL_CONFIDENCE).copied(),
                penalty: t.penalty,
                adjudication_note: t.notes.clone(),
            }
        })
        .collect()
}

pub fn header_line() -> String {
    SHEET_COLUMNS.join("\t")
}

pub fn emit_rows(rows: &[SheetRow]) -> String {
    let mut out = header_line();
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.to_line());
    }
    out
}

pub fn emit_sheet(sentences: &[Sentence]) -> String {
    let rows: Vec<SheetRow> = sentences.iter().flat_map(sheet_rows).collect();
    emit_rows(&rows)
}

pub fn parse_sheet(text: &str) -> Result<Vec<Sentence>, SheetError> {
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines.next().unwrap_or("");
    if header != header_line() {
        return Err(SheetError::HeaderMismatch {
            found: header.to_string(),
        });
    }
    let mut groups: Vec<Vec<(usize, Vec<&str>)>> = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != SHEET_COLUMNS.len() {
            return Err(SheetError::MalformedRow {
                row,
                reason: format!("expected 15 columns, found {}", cols.len()),
            });
        }
        match groups.last_mut() {
            Some(g) if g[0].1[0] == cols[0] => g.push((row, cols)),
            _ => groups.push(vec![(row, cols)]),
        }
    }
    groups.iter().map(|g| parse_group(g)).collect()
}

fn parse_group(rows: &[(usize, Vec<&str>)]) -> Result<Sentence, SheetError> {
    let malformed = |row: usize, reason: String| SheetError::MalformedRow { row, reason };
    let mut ids = Vec::with_capacity(rows.len());
    for (k, (row, cols)) in rows.iter().enumerate() {
        let sheet_id: u32 = cols[4].parse().map_err(|_| malformed(*row, "invalid sheet_ID".into()))?;
        if sheet_id as usize != k + 1 {
            return Err(SheetError::NonContiguousSheetId { row: *row });
        }
        let id: NodeId = cols[3].parse().map_err(|_| malformed(*row, "invalid ID".into()))?;
        ids.push(id);
    }
    let sheet_of: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i + 1)).collect();

    let mut sentence = Sentence::new(rows[0].1[0], Vec::new());
    for (k, (row, cols)) in rows.iter().enumerate() {
        let row = *row;
        let blank = |c: &str| (!c.is_empty()).then(|| c.to_string());
        let form = if cols[5].is_empty() { cols[2] } else { cols[5] };
        let mut t = Token::new(ids[k], form);
        t.orig_token_index = match blank(cols[1]) {
            Some(v) => Some(v.parse().map_err(|_| malformed(row, "invalid orig_token_index".into()))?),
            None => None,
        };
        t.lemma = blank(cols[6]);
        t.upos = match blank(cols[7]) {
            Some(u) => Some(u.parse::<Upos>().map_err(|e| malformed(row, e.to_string()))?),
            None => None,
        };
        t.head = match blank(cols[8]) {
            Some(h) => Some(h.parse::<Head>().map_err(|e| malformed(row, e.to_string()))?),
            None => None,
        };
        let sheet_head: Option<usize> = match blank(cols[9]) {
            Some(v) => Some(v.parse().map_err(|_| malformed(row, "invalid sheet_HEAD_ID".into()))?),
            None => None,
        };
        match (t.head, sheet_head) {
            (Some(Head::Root), Some(0)) => {
                if cols[10] != "root" {
                    return Err(SheetError::InconsistentHeadForm { row });
                }
            }
            (Some(Head::Node(h)), Some(sh)) => {
                if sheet_of.get(&h) != Some(&sh) {
                    return Err(SheetError::InconsistentHeadId { row });
                }
                if rows[sh - 1].1[5] != cols[10] {
                    return Err(SheetError::InconsistentHeadForm { row });
                }
            }
            // A head outside the sentence or no head at all carries no sheet pointer.
            (Some(Head::Node(h)), None) if !sheet_of.contains_key(&h) => {}
            (None, None) => {}
            _ => return Err(SheetError::InconsistentHeadId { row }),
        }
        t.deprel = blank(cols[11]).map(|d| canonical_deprel(&d));
        if let Some(c) = blank(cols[12]) {
            let c: f64 = c.parse().map_err(|_| malformed(row, "invalid final_confidence".into()))?;
            t.confidences.insert(FINAL_CONFIDENCE.to_string(), c);
        }
        t.penalty = cols[13].parse().map_err(|_| malformed(row, "invalid penalty".into()))?;
        t.notes = cols[14].to_string();
        sentence.tokens.push(t);
    }
    Ok(sentence)
}
