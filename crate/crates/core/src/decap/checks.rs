//! Stage-output validation. Every check returns violations instead of failing
//! fast so that a retry prompt can list all of them at once.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::envelope::{CoreOutput, LsrOutput, SphOutput, StageEnvelope};
use crate::ud::{Head, NodeId, RelationSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    NotJson,
    NotObject,
    Schema,
    SentenceIdMismatch,
    OriginalTokensChanged,
    IdOrder,
    DuplicateId,
    NonContiguousIds,
    IdMapIncomplete,
    IdMapUnknownOriginal,
    IdMapDuplicate,
    IdMapOrder,
    IdMapUnknownNode,
    IdMapMissingNode,
    OrigIndexMismatch,
    DottedFormMismatch,
    DanglingAnchor,
    ConfidenceRange,
    LemmaCase,
    SphEditDropped,
    UnknownNode,
    MissingNode,
    MweComponentAnnotated,
    NoRoot,
    MultipleRoots,
    UposNotAllowed,
    DeprelNotAllowed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<NodeId>,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, node: Option<NodeId>, message: impl Into<String>) -> Self {
        Violation {
            code,
            node,
            message: message.into(),
        }
    }
}

fn confidence_ok(v: Option<f64>) -> bool {
    v.is_none_or(|c| (0.0..=1.0).contains(&c))
}

/// Checks shared by SPH and LSR envelopes.
pub fn check_envelope(env: &StageEnvelope, sentence_id: &str, original: &[String]) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = Vec::new();
    if env.sentence_id != sentence_id {
        out.push(Violation::new(
            SentenceIdMismatch,
            None,
            format!("sentence_id {:?} should be {sentence_id:?}", env.sentence_id),
        ));
    }
    if !env.original_tokens.is_empty() && env.original_tokens != original {
        out.push(Violation::new(OriginalTokensChanged, None, "original_tokens must repeat the input tokens unchanged"));
    }

    let mut seen = HashSet::new();
    for pair in env.tokens.windows(2) {
        if pair[0].id >= pair[1].id {
            out.push(Violation::new(
                IdOrder,
                Some(pair[1].id),
                format!("proposed_ID {} does not follow {}", pair[1].id, pair[0].id),
            ));
        }
    }
    for t in &env.tokens {
        if !seen.insert(t.id) {
            out.push(Violation::new(DuplicateId, Some(t.id), format!("proposed_ID {} repeated", t.id)));
        }
    }
    let ints: BTreeSet<u32> = env.tokens.iter().filter(|t| t.id.is_integer()).map(|t| t.id.major()).collect();
    if ints.iter().copied().ne(1..=ints.len() as u32) {
        out.push(Violation::new(NonContiguousIds, None, "integer proposed_IDs must run 1..N without gaps"));
    }

    // Id map: complete over the original indices, each node listed exactly once.
    let n = original.len() as u32;
    for o in 1..=n {
        if !env.proposed_id_map.contains_key(&o) {
            out.push(Violation::new(IdMapIncomplete, None, format!("proposed_id_map lacks original index {o}")));
        }
    }
    let mut mapped: HashMap<NodeId, u32> = HashMap::new();
    let mut last_max: Option<NodeId> = None;
    for (o, ids) in &env.proposed_id_map {
        if *o == 0 || *o > n {
            out.push(Violation::new(
                IdMapUnknownOriginal,
                None,
                format!("proposed_id_map has unknown original index {o}"),
            ));
        }
        if ids.windows(2).any(|w| w[0] >= w[1]) || ids.first().zip(last_max).is_some_and(|(f, m)| *f <= m) {
            out.push(Violation::new(IdMapOrder, None, format!("proposed_id_map entry {o} is out of order")));
        }
        if let Some(m) = ids.iter().max() {
            last_max = Some(last_max.map_or(*m, |l| l.max(*m)));
        }
        for id in ids {
            if mapped.insert(*id, *o).is_some() {
                out.push(Violation::new(IdMapDuplicate, Some(*id), format!("{id} appears twice in proposed_id_map")));
            }
            if !seen.contains(id) {
                out.push(Violation::new(IdMapUnknownNode, Some(*id), format!("proposed_id_map names missing node {id}")));
            }
        }
    }
    for t in &env.tokens {
        match mapped.get(&t.id) {
            None => out.push(Violation::new(
                IdMapMissingNode,
                Some(t.id),
                format!("node {} is absent from proposed_id_map", t.id),
            )),
            Some(o) if t.orig_token_index.is_some_and(|ti| ti != *o) => out.push(Violation::new(
                OrigIndexMismatch,
                Some(t.id),
                format!("node {} has orig_token_index {:?} but is mapped from {o}", t.id, t.orig_token_index),
            )),
            _ => {}
        }
    }

    let skeleton = env.skeleton();
    let forms: HashMap<NodeId, &str> = env.tokens.iter().map(|t| (t.id, t.split_token.as_str())).collect();
    for span in skeleton.mwe_spans() {
        let form = forms[&span.node];
        let parts = crate::ud::mwe_part_count(form);
        let joined = span.components.iter().map(|c| forms[c]).collect::<Vec<_>>().join("_");
        if span.components.len() != parts || !joined.eq_ignore_ascii_case(form) {
            out.push(Violation::new(
                DottedFormMismatch,
                Some(span.node),
                format!("dotted node {} {form:?} must join its component rows ({joined:?})", span.node),
            ));
        }
    }

    for t in &env.tokens {
        if let Some(a) = t.spoken_anchor {
            if a == t.id || !seen.contains(&a) {
                out.push(Violation::new(
                    DanglingAnchor,
                    Some(t.id),
                    format!("spoken_anchor {a} of {} is not another node", t.id),
                ));
            }
        }
        if !confidence_ok(t.sph_confidence) || !confidence_ok(t.lsr_confidence) {
            out.push(Violation::new(ConfidenceRange, Some(t.id), format!("confidence of {} outside [0,1]", t.id)));
        }
    }
    if !confidence_ok(env.confidence) {
        out.push(Violation::new(ConfidenceRange, None, "envelope confidence outside [0,1]"));
    }
    out
}

pub fn check_sph(sph: &SphOutput, sentence_id: &str, original: &[String]) -> Vec<Violation> {
    check_envelope(sph, sentence_id, original)
}

pub fn check_lsr(lsr: &LsrOutput, sph: &SphOutput, original: &[String]) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = check_envelope(lsr, &sph.sentence_id, original);
    for t in &lsr.tokens {
        if let Some(l) = &t.lemma {
            if *l != l.to_lowercase() {
                out.push(Violation::new(LemmaCase, Some(t.id), format!("lemma {l:?} of {} must be lowercase", t.id)));
            }
        }
    }
    let int_parts = |env: &StageEnvelope, o: &u32| {
        env.proposed_id_map
            .get(o)
            .map(|ids| ids.iter().filter(|i| i.is_integer()).count())
            .unwrap_or(0)
    };
    for o in sph.proposed_id_map.keys() {
        if int_parts(lsr, o) < int_parts(sph, o) {
            out.push(Violation::new(
                SphEditDropped,
                None,
                format!("original token {o} lost a split made upstream"),
            ));
        }
    }
    let dotted = |env: &StageEnvelope| -> Vec<String> {
        let mut v: Vec<String> = env
            .tokens
            .iter()
            .filter(|t| t.id.is_dotted())
            .map(|t| t.split_token.to_lowercase())
            .collect();
        v.sort();
        v
    };
    let mut have = dotted(lsr);
    for form in dotted(sph) {
        match have.iter().position(|f| *f == form) {
            Some(i) => {
                have.remove(i);
            }
            None => out.push(Violation::new(
                SphEditDropped,
                None,
                format!("multiword node {form:?} proposed upstream is missing"),
            )),
        }
    }
    out
}

pub fn check_core(core: &CoreOutput, lsr: &LsrOutput, relations: &RelationSet) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = Vec::new();
    if core.sentence_id != lsr.sentence_id {
        out.push(Violation::new(
            SentenceIdMismatch,
            None,
            format!("sentence_id {:?} should be {:?}", core.sentence_id, lsr.sentence_id),
        ));
    }
    let skeleton = lsr.skeleton();
    let comps = skeleton.mwe_components();
    let nodes: HashSet<NodeId> = lsr.tokens.iter().map(|t| t.id).collect();
    let mut seen = HashSet::new();
    let mut roots = Vec::new();
    for t in &core.annotated_tokens {
        if !seen.insert(t.id) {
            out.push(Violation::new(DuplicateId, Some(t.id), format!("{} annotated twice", t.id)));
        }
        if !nodes.contains(&t.id) {
            out.push(Violation::new(UnknownNode, Some(t.id), format!("{} is not an upstream node", t.id)));
            continue;
        }
        if comps.contains(&t.id) {
            if t.is_annotated() {
                out.push(Violation::new(
                    MweComponentAnnotated,
                    Some(t.id),
                    format!("{} is a component row of a multiword node and must stay unannotated", t.id),
                ));
            }
            continue;
        }
        if t.head == Some(Head::Root) {
            roots.push(t.id);
        }
        if let Some(u) = &t.upos {
            if t.parsed_upos().is_none() {
                out.push(Violation::new(UposNotAllowed, Some(t.id), format!("UPOS {u:?} on {} is not allowed", t.id)));
            }
        }
        if let Some(d) = &t.deprel {
            if !relations.contains(d) {
                out.push(Violation::new(DeprelNotAllowed, Some(t.id), format!("DEPREL {d:?} on {} is not allowed", t.id)));
            }
        }
        if !confidence_ok(t.core_confidence) {
            out.push(Violation::new(ConfidenceRange, Some(t.id), format!("core_confidence of {} outside [0,1]", t.id)));
        }
    }
    for t in &lsr.tokens {
        if !comps.contains(&t.id) && !seen.contains(&t.id) {
            out.push(Violation::new(MissingNode, Some(t.id), format!("node {} has no annotation", t.id)));
        }
    }
    match roots.len() {
        0 => out.push(Violation::new(NoRoot, None, "exactly one node must have HEAD_ID \"0\"; found none")),
        1 => {}
        n => out.push(Violation::new(
            MultipleRoots,
            None,
            format!(
                "exactly one node must have HEAD_ID \"0\"; found {n}: {}",
                crate::ud::join_ids(&roots)
            ),
        )),
    }
    out
}
