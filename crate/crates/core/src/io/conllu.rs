//! CoNLL-U reader and writer.
//!
//! Multiword range lines (`3-4`) are kept in sentence metadata under
//! `mwt:<range>` so they survive a round trip without becoming tokens.
//! The MISC keys `Lang`, `SpokenLabel`, `SpokenAnchor` and `Orig` are lifted
//! into typed token fields; other MISC entries pass through untouched.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ud::{canonical_deprel, Category, Head, LangTag, NodeId, Sentence, SpokenLabel, Token, Upos};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConlluError {
    #[error("line {line_no}: {reason}: {content:?}")]
    MalformedLine {
        line_no: usize,
        content: String,
        reason: String,
    },
    #[error("line {line_no}: unknown category {label:?}")]
    UnknownCategory { line_no: usize, label: String },
}

const RANGE_PREFIX: &str = "mwt:";

pub fn parse_conllu(text: &str) -> Result<Vec<Sentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if !block.is_empty() {
                sentences.push(parse_block(&block, sentences.len() + 1)?);
                block.clear();
            }
        } else {
            block.push((i + 1, line));
        }
    }
    if !block.is_empty() {
        sentences.push(parse_block(&block, sentences.len() + 1)?);
    }
    Ok(sentences)
}

fn parse_block(lines: &[(usize, &str)], ordinal: usize) -> Result<Sentence, ConlluError> {
    let mut sentence = Sentence::new(String::new(), Vec::new());
    let mut sent_id = None;
    for &(line_no, line) in lines {
        if let Some(comment) = line.strip_prefix('#') {
            let (key, value) = match comment.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (comment.trim(), ""),
            };
            match key {
                "sent_id" => sent_id = Some(value.to_string()),
                "category" => {
                    let category = value.parse::<Category>().map_err(|_| ConlluError::UnknownCategory {
                        line_no,
                        label: value.to_string(),
                    })?;
                    sentence.category = Some(category);
                }
                _ => {
                    sentence.metadata.insert(key.to_string(), value.to_string());
                }
            }
            continue;
        }
        let malformed = |reason: &str| ConlluError::MalformedLine {
            line_no,
            content: line.to_string(),
            reason: reason.to_string(),
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(malformed(&format!("expected 10 tab-separated columns, found {}", cols.len())));
        }
        if cols[0].contains('-') {
            sentence
                .metadata
                .insert(format!("{RANGE_PREFIX}{}", cols[0]), cols[1..].join("\t"));
            continue;
        }
        let id: NodeId = cols[0].parse().map_err(|_| malformed("invalid ID"))?;
        let mut token = Token::new(id, if cols[1] == "_" { "" } else { cols[1] });
        token.lemma = opt(cols[2]);
        token.upos = match opt(cols[3]) {
            Some(u) => Some(u.parse::<Upos>().map_err(|_| malformed("unknown UPOS"))?),
            None => None,
        };
        token.xpos = opt(cols[4]);
        token.feats = opt(cols[5]);
        token.head = match opt(cols[6]) {
            Some(h) => Some(h.parse::<Head>().map_err(|_| malformed("invalid HEAD"))?),
            None => None,
        };
        token.deprel = opt(cols[7]).map(|d| canonical_deprel(&d));
        token.deps = opt(cols[8]);
        read_misc(&mut token, cols[9]).map_err(|reason| malformed(&reason))?;
        sentence.tokens.push(token);
    }
    sentence.sentence_id = sent_id.unwrap_or_else(|| format!("s{ordinal}"));
    Ok(sentence)
}

fn opt(col: &str) -> Option<String> {
    (col != "_" && !col.is_empty()).then(|| col.to_string())
}

fn read_misc(token: &mut Token, col: &str) -> Result<(), String> {
    if col == "_" || col.is_empty() {
        return Ok(());
    }
    let mut rest = Vec::new();
    for entry in col.split('|') {
        match entry.split_once('=') {
            Some(("Lang", v)) => token.lang_tag = v.parse::<LangTag>().map_err(|e| e.to_string())?,
            Some(("SpokenLabel", v)) => token.spoken_label = SpokenLabel::parse_opt(v).map_err(|e| e.to_string())?,
            Some(("SpokenAnchor", v)) => {
                token.spoken_anchor = Some(v.parse::<NodeId>().map_err(|e| e.to_string())?)
            }
            Some(("Orig", v)) => token.orig_token_index = Some(v.parse::<u32>().map_err(|e| e.to_string())?),
            _ => rest.push(entry),
        }
    }
    if !rest.is_empty() {
        token.misc = Some(rest.join("|"));
    }
    Ok(())
}

fn write_misc(token: &Token) -> String {
    let mut entries = Vec::new();
    if token.lang_tag != LangTag::Unknown {
        entries.push(format!("Lang={}", token.lang_tag));
    }
    if let Some(l) = token.spoken_label {
        entries.push(format!("SpokenLabel={l}"));
    }
    if let Some(a) = token.spoken_anchor {
        entries.push(format!("SpokenAnchor={a}"));
    }
    if let Some(o) = token.orig_token_index {
        entries.push(format!("Orig={o}"));
    }
    if let Some(m) = &token.misc {
        entries.push(m.clone());
    }
    if entries.is_empty() {
        "_".to_string()
    } else {
        entries.join("|")
    }
}

fn col(value: Option<&str>) -> &str {
    match value {
        Some(v) if !v.is_empty() => v,
        _ => "_",
    }
}

pub fn emit_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        let _ = writeln!(out, "# sent_id = {}", s.sentence_id);
        if let Some(c) = s.category {
            let _ = writeln!(out, "# category = {c}");
        }
        for (k, v) in s.metadata.iter().filter(|(k, _)| !k.starts_with(RANGE_PREFIX)) {
            if v.is_empty() {
                let _ = writeln!(out, "# {k}");
            } else {
                let _ = writeln!(out, "# {k} = {v}");
            }
        }
        let ranges: Vec<(u32, &str, &str)> = s
            .metadata
            .iter()
            .filter_map(|(k, v)| {
                let range = k.strip_prefix(RANGE_PREFIX)?;
                let start = range.split('-').next()?.parse().ok()?;
                Some((start, range, v.as_str()))
            })
            .collect();
        let mut emitted_ranges = vec![false; ranges.len()];
        for t in &s.tokens {
            if t.id.is_integer() {
                for (i, (start, range, rest)) in ranges.iter().enumerate() {
                    if !emitted_ranges[i] && *start <= t.id.major() {
                        let _ = writeln!(out, "{range}\t{rest}");
                        emitted_ranges[i] = true;
                    }
                }
            }
            let upos = t.upos.map(|u| u.as_str());
            let head = t.head.map(|h| h.to_string());
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.id,
                col(Some(&t.form)),
                col(t.lemma.as_deref()),
                col(upos),
                col(t.xpos.as_deref()),
                col(t.feats.as_deref()),
                col(head.as_deref()),
                col(t.deprel.as_deref()),
                col(t.deps.as_deref()),
                write_misc(t),
            );
        }
        for (i, (_, range, rest)) in ranges.iter().enumerate() {
            if !emitted_ranges[i] {
                let _ = writeln!(out, "{range}\t{rest}");
            }
        }
        out.push('\n');
    }
    out
}
