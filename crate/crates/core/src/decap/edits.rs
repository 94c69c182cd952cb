//! Tokenization edits on an envelope: contraction splits that renumber the
//! following integer nodes, and dotted multiword nodes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::envelope::{EnvelopeToken, StageEnvelope};
use crate::ud::{LangTag, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("original token {orig} is not in the id map")]
    UnknownOriginal { orig: u32 },
    #[error("original token {orig} already maps to several integer nodes")]
    AlreadySplit { orig: u32 },
    #[error("node {node} is dotted and cannot be split")]
    SplitOnDottedNode { node: NodeId },
    #[error("node {node} is a component of a multiword node")]
    SplitInsideMwe { node: NodeId },
    #[error("a split needs at least two parts, got {count}")]
    TooFewParts { count: usize },
    #[error("split part {index} is empty")]
    EmptyPart { index: usize },
    #[error("a multiword span needs at least two nodes")]
    SpanTooShort,
    #[error("span nodes must be consecutive existing integer nodes")]
    NonContiguousSpan,
    #[error("span overlaps the multiword node {existing}")]
    OverlappingMwe { existing: NodeId },
}

/// What a split did to the numbering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdMapDelta {
    pub orig: u32,
    pub ids: Vec<NodeId>,
    /// Integer nodes with a major above this value moved up by `shift`.
    pub shifted_after: u32,
    pub shift: u32,
}

impl StageEnvelope {
    /// Splits the single integer node of original token `split_at` into
    /// `parts`, renumbering every later node.
    pub fn apply_integer_shift(&mut self, split_at: u32, parts: &[String]) -> Result<IdMapDelta, EditError> {
        let ids = self
            .proposed_id_map
            .get(&split_at)
            .ok_or(EditError::UnknownOriginal { orig: split_at })?;
        let ints: Vec<NodeId> = ids.iter().copied().filter(|i| i.is_integer()).collect();
        let target = match ints.as_slice() {
            [one] => *one,
            [] => {
                return Err(EditError::SplitOnDottedNode {
                    node: ids.first().copied().unwrap_or(NodeId::int(split_at)),
                })
            }
            _ => return Err(EditError::AlreadySplit { orig: split_at }),
        };
        self.split_node(target, parts).map(|mut d| {
            d.orig = split_at;
            d
        })
    }

    /// Splits node `target` in place; the first part keeps the node id.
    pub fn split_node(&mut self, target: NodeId, parts: &[String]) -> Result<IdMapDelta, EditError> {
        if target.is_dotted() {
            return Err(EditError::SplitOnDottedNode { node: target });
        }
        if parts.len() < 2 {
            return Err(EditError::TooFewParts { count: parts.len() });
        }
        if let Some(index) = parts.iter().position(|p| p.trim().is_empty()) {
            return Err(EditError::EmptyPart { index });
        }
        let skeleton = self.skeleton();
        if skeleton.mwe_components().contains(&target) {
            return Err(EditError::SplitInsideMwe { node: target });
        }
        let pos = self
            .tokens
            .iter()
            .position(|t| t.id == target)
            .ok_or(EditError::SplitOnDottedNode { node: target })?;
        let k = parts.len() as u32 - 1;
        let cut = target.major();
        let shift = |id: NodeId| if id.major() > cut { id.shifted(k) } else { id };

        for t in &mut self.tokens {
            t.id = shift(t.id);
            t.spoken_anchor = t.spoken_anchor.map(shift);
        }
        for ids in self.proposed_id_map.values_mut() {
            for id in ids.iter_mut() {
                *id = shift(*id);
            }
        }

        let template = self.tokens[pos].clone();
        self.tokens[pos].split_token = parts[0].clone();
        let new_ids: Vec<NodeId> = (0..=k).map(|i| NodeId::int(cut + i)).collect();
        for (i, part) in parts.iter().enumerate().skip(1) {
            let mut t = template.clone();
            t.id = new_ids[i];
            t.split_token = part.clone();
            t.lemma = None;
            self.tokens.insert(pos + i, t);
        }
        let orig = template.orig_token_index;
        if let Some(o) = orig.or_else(|| self.orig_of(target)) {
            let entry = self.proposed_id_map.entry(o).or_default();
            entry.extend(new_ids.iter().skip(1).copied());
            entry.sort();
            entry.dedup();
        }
        Ok(IdMapDelta {
            orig: orig.unwrap_or(0),
            ids: new_ids,
            shifted_after: cut,
            shift: k,
        })
    }

    /// Adds the dotted node `<start>.1` over consecutive integer nodes.
    pub fn make_dotted_mwe(&mut self, span: &[NodeId]) -> Result<NodeId, EditError> {
        if span.len() < 2 {
            return Err(EditError::SpanTooShort);
        }
        let start = span[0];
        let consecutive = span
            .iter()
            .enumerate()
            .all(|(i, id)| id.is_integer() && id.major() == start.major() + i as u32 && self.get(*id).is_some());
        if !consecutive {
            return Err(EditError::NonContiguousSpan);
        }
        let skeleton = self.skeleton();
        for s in skeleton.mwe_spans() {
            if s.node.major() == start.major() || s.components.iter().any(|c| span.contains(c)) {
                return Err(EditError::OverlappingMwe { existing: s.node });
            }
        }
        if let Some(t) = self.tokens.iter().find(|t| t.id.is_dotted() && t.id.major() == start.major()) {
            return Err(EditError::OverlappingMwe { existing: t.id });
        }

        let members: Vec<&EnvelopeToken> = span.iter().map(|id| self.get(*id).expect("checked")).collect();
        let form = members.iter().map(|t| t.split_token.as_str()).collect::<Vec<_>>().join("_");
        let lang = if members.iter().all(|t| t.lang_tag == members[0].lang_tag) {
            members[0].lang_tag
        } else {
            LangTag::Mixed
        };
        let orig = members[0].orig_token_index;
        let node = NodeId::dotted(start.major(), 1);
        let mut token = EnvelopeToken::new(node, orig, form.clone());
        token.lang_tag = lang;
        token.lemma = Some(form.to_lowercase());
        token.mwe = Some(true);
        token.sph_confidence = members[0].sph_confidence;
        token.lsr_confidence = members[0].lsr_confidence;

        let pos = self.tokens.iter().position(|t| t.id > node).unwrap_or(self.tokens.len());
        self.tokens.insert(pos, token);
        if let Some(o) = orig.or_else(|| self.orig_of(start)) {
            let entry = self.proposed_id_map.entry(o).or_default();
            entry.push(node);
            entry.sort();
        }
        Ok(node)
    }
}
