//! Deterministic verification and repair: merges the three stage outputs
//! into one well-formed tree and logs every change it makes.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::debug;

use super::envelope::{CoreOutput, CoreToken, LsrOutput, SphOutput, StageEnvelope};
use crate::io::{sheet_rows, SheetRow, FINAL_CONFIDENCE};
use crate::ud::{canonical_deprel, Head, HeadGraph, NodeId, RelationSet, Sentence, SpokenLabel, Token, Upos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairKind {
    WhitelistMwe,
    SpokenLabel,
    ComponentCleared,
    IgnoredAnnotation,
    HeadResolved,
    FilledUpos,
    FilledDeprel,
    RootReattached,
    RootPromoted,
    RootRelabeled,
    CycleBroken,
}

impl RepairKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RepairKind::WhitelistMwe => "whitelist_mwe",
            RepairKind::SpokenLabel => "spoken_label",
            RepairKind::ComponentCleared => "component_cleared",
            RepairKind::IgnoredAnnotation => "ignored_annotation",
            RepairKind::HeadResolved => "head_resolved",
            RepairKind::FilledUpos => "filled_upos",
            RepairKind::FilledDeprel => "filled_deprel",
            RepairKind::RootReattached => "root_reattached",
            RepairKind::RootPromoted => "root_promoted",
            RepairKind::RootRelabeled => "root_relabeled",
            RepairKind::CycleBroken => "cycle_broken",
        }
    }

    /// Structural fixes count towards a token's penalty; label mapping and
    /// bookkeeping entries do not.
    pub fn penalized(self) -> bool {
        !matches!(
            self,
            RepairKind::WhitelistMwe | RepairKind::SpokenLabel | RepairKind::IgnoredAnnotation
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repair {
    pub kind: RepairKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<NodeId>,
    pub message: String,
}

impl Repair {
    fn new(kind: RepairKind, node: Option<NodeId>, message: impl Into<String>) -> Self {
        let r = Repair {
            kind,
            node,
            message: message.into(),
        };
        debug!(kind = kind.as_str(), message = %r.message, "repair");
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VrConfig {
    /// Weights of the core, lsr and sph confidences in the combined score.
    pub confidence_weights: [f64; 3],
    /// Used in place of a missing stage confidence.
    pub missing_confidence: f64,
    /// Multiplier applied to the combined confidence of a repaired token.
    pub repaired_factor: f64,
    /// Penalty added per structural repair on a token, capped at 1.
    pub penalty_step: f64,
    /// Filled from the pipeline section of the toolkit config.
    #[serde(skip)]
    pub relations: RelationSet,
}

impl Default for VrConfig {
    fn default() -> Self {
        VrConfig {
            confidence_weights: [0.5, 0.3, 0.2],
            missing_confidence: 0.5,
            repaired_factor: 0.8,
            penalty_step: 0.25,
            relations: RelationSet::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinalizeError {
    #[error("stage outputs cannot be merged: {reason}")]
    IrreconcilableEnvelopes { reason: String },
}

/// The adjudicated parse of one sentence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalParse {
    pub sentence_id: String,
    pub rows: Vec<SheetRow>,
    pub adjudication_log: Vec<String>,
    pub final_summary: String,
    pub repairs: Vec<Repair>,
    #[serde(skip)]
    pub sentence: Sentence,
}

/// Adds a dotted node for every whitelisted phrase found over consecutive
/// integer nodes that are not already inside a multiword node.
pub fn apply_whitelist(lsr: &mut LsrOutput, whitelist: &[String]) -> Vec<Repair> {
    let mut out = Vec::new();
    for phrase in whitelist {
        let words: Vec<String> = phrase.split_whitespace().map(str::to_lowercase).collect();
        if words.len() < 2 {
            continue;
        }
        let mut start = 0;
        loop {
            let ints: Vec<(NodeId, String)> = lsr
                .tokens
                .iter()
                .filter(|t| t.id.is_integer())
                .map(|t| (t.id, t.split_token.to_lowercase()))
                .collect();
            let Some(i) = (start..ints.len().saturating_sub(words.len() - 1))
                .find(|&i| ints[i..i + words.len()].iter().zip(&words).all(|((_, f), w)| f == w))
            else {
                break;
            };
            start = i + 1;
            let span: Vec<NodeId> = ints[i..i + words.len()].iter().map(|(id, _)| *id).collect();
            match lsr.make_dotted_mwe(&span) {
                Ok(node) => out.push(Repair::new(
                    RepairKind::WhitelistMwe,
                    Some(node),
                    format!("added multiword node {node} for whitelisted {phrase:?}"),
                )),
                Err(e) => debug!(%phrase, error = %e, "whitelist phrase not applied"),
            }
        }
    }
    out
}

/// Node in `to` corresponding to `id` in `from`, matched through the id
/// maps: integer nodes by their rank within the original token, dotted
/// nodes by form.
fn translate(from: &StageEnvelope, to: &StageEnvelope, id: NodeId) -> Option<NodeId> {
    if id.is_dotted() {
        let form = from.get(id)?.split_token.to_lowercase();
        return to
            .tokens
            .iter()
            .find(|t| t.id.is_dotted() && t.split_token.to_lowercase() == form)
            .map(|t| t.id);
    }
    let o = from.orig_of(id)?;
    let rank = from.proposed_id_map[&o].iter().filter(|i| i.is_integer()).position(|i| *i == id)?;
    to.proposed_id_map
        .get(&o)?
        .iter()
        .filter(|i| i.is_integer())
        .nth(rank)
        .copied()
}

/// Spoken label and anchor of an LSR node, falling back to the SPH envelope.
fn spoken_of(lsr: &LsrOutput, sph: &SphOutput, id: NodeId) -> (Option<SpokenLabel>, Option<NodeId>) {
    if let Some(t) = lsr.get(id) {
        if t.spoken_label.is_some() {
            return (t.spoken_label, t.spoken_anchor);
        }
    }
    let Some(s) = translate(lsr, sph, id).and_then(|sid| sph.get(sid)) else {
        return (None, None);
    };
    let anchor = s.spoken_anchor.and_then(|a| translate(sph, lsr, a));
    (s.spoken_label, anchor)
}

/// Applies upstream spoken labels to the Core annotation.
pub fn map_spoken_labels(core: &CoreOutput, lsr: &LsrOutput, sph: &SphOutput) -> (CoreOutput, Vec<Repair>) {
    let mut out = core.clone();
    let mut repairs = Vec::new();
    let comps = lsr.skeleton().mwe_components();
    let annotatable: HashSet<NodeId> = lsr.tokens.iter().map(|t| t.id).filter(|id| !comps.contains(id)).collect();
    let root = out
        .annotated_tokens
        .iter()
        .find(|t| t.head == Some(Head::Root) && annotatable.contains(&t.id))
        .map(|t| t.id);
    let valid = |n: NodeId, me: NodeId| n != me && annotatable.contains(&n);

    for t in out.annotated_tokens.iter_mut() {
        if !annotatable.contains(&t.id) {
            continue;
        }
        let (label, anchor) = spoken_of(lsr, sph, t.id);
        let Some(label) = label else { continue };
        if Some(t.id) == root {
            repairs.push(Repair::new(
                RepairKind::IgnoredAnnotation,
                Some(t.id),
                format!("{} is the root; its {label} label was not applied", t.id),
            ));
            continue;
        }
        let anchor = anchor.filter(|a| valid(*a, t.id));
        let to_root = root.map(Head::Node);
        let before = (t.upos.clone(), t.head, t.deprel.clone());
        match label {
            SpokenLabel::Reparandum => {
                t.deprel = Some("reparandum".into());
                let core_head = t.head.filter(|h| h.node().is_some_and(|n| valid(n, t.id)));
                t.head = anchor.map(Head::Node).or(core_head).or(to_root).or(t.head);
            }
            SpokenLabel::Discourse | SpokenLabel::Filler => {
                t.upos = Some(Upos::Intj.as_str().into());
                t.deprel = Some("discourse".into());
                t.head = anchor.map(Head::Node).or(to_root).or(t.head);
            }
            SpokenLabel::Dep => {
                t.deprel = Some("dep".into());
                t.head = to_root.or(t.head);
            }
        }
        if before != (t.upos.clone(), t.head, t.deprel.clone()) {
            let head = t.head.map(|h| h.to_string()).unwrap_or_default();
            repairs.push(Repair::new(
                RepairKind::SpokenLabel,
                Some(t.id),
                format!(
                    "{} {:?}: {label} mapped to {}/{} under {head}",
                    t.id,
                    t.form,
                    t.upos.as_deref().unwrap_or("_"),
                    t.deprel.as_deref().unwrap_or("_")
                ),
            ));
        }
    }
    (out, repairs)
}

struct Builder<'a> {
    sentence: Sentence,
    repairs: Vec<Repair>,
    comps: std::collections::BTreeSet<NodeId>,
    cfg: &'a VrConfig,
}

impl Builder<'_> {
    fn log(&mut self, kind: RepairKind, node: Option<NodeId>, message: String) {
        self.repairs.push(Repair::new(kind, node, message));
    }

    fn annotatable(&self) -> Vec<usize> {
        (0..self.sentence.tokens.len())
            .filter(|&i| !self.comps.contains(&self.sentence.tokens[i].id))
            .collect()
    }

    fn root_token(&self) -> Option<NodeId> {
        self.annotatable()
            .into_iter()
            .map(|i| &self.sentence.tokens[i])
            .find(|t| t.head == Some(Head::Root))
            .map(|t| t.id)
    }

    fn combined(&self, t: &Token) -> f64 {
        let get = |k: &str| t.confidences.get(k).copied().unwrap_or(self.cfg.missing_confidence);
        let [wc, wl, ws] = self.cfg.confidence_weights;
        wc * get("core") + wl * get("lsr") + ws * get("sph")
    }

    fn resolve_heads(&mut self, head_forms: &HashMap<NodeId, String>) {
        let ann = self.annotatable();
        let valid: HashSet<NodeId> = ann.iter().map(|&i| self.sentence.tokens[i].id).collect();
        let mut unresolved = Vec::new();
        for &i in &ann {
            let t = &self.sentence.tokens[i];
            let ok = match t.head {
                Some(Head::Root) => true,
                Some(Head::Node(h)) => h != t.id && valid.contains(&h),
                None => false,
            };
            if !ok {
                unresolved.push(i);
            }
        }
        for i in unresolved {
            let id = self.sentence.tokens[i].id;
            let old = self.sentence.tokens[i].head;
            let by_form = head_forms.get(&id).and_then(|f| {
                if f.eq_ignore_ascii_case("root") {
                    return Some(Head::Root);
                }
                let hits: Vec<NodeId> = ann
                    .iter()
                    .map(|&j| &self.sentence.tokens[j])
                    .filter(|c| c.id != id && c.form.eq_ignore_ascii_case(f))
                    .map(|c| c.id)
                    .collect();
                (hits.len() == 1).then(|| Head::Node(hits[0]))
            });
            let by_anchor = self.sentence.tokens[i]
                .spoken_anchor
                .filter(|a| *a != id && valid.contains(a))
                .map(Head::Node);
            let (head, how) = if let Some(h) = by_form {
                (h, "HEAD_FORM")
            } else if let Some(h) = by_anchor {
                (h, "spoken anchor")
            } else {
                match self.root_token().filter(|r| *r != id) {
                    Some(r) => (Head::Node(r), "root token"),
                    None => (Head::Root, "sentence root"),
                }
            };
            self.sentence.tokens[i].head = Some(head);
            let old = old.map(|h| h.to_string()).unwrap_or_else(|| "none".into());
            self.log(
                RepairKind::HeadResolved,
                Some(id),
                format!("head of {id} was {old}; set to {head} via {how}"),
            );
        }
    }

    fn fill_labels(&mut self) {
        for i in self.annotatable() {
            let t = &mut self.sentence.tokens[i];
            let id = t.id;
            if t.upos.is_none() {
                t.upos = Some(Upos::X);
                self.log(RepairKind::FilledUpos, Some(id), format!("UPOS of {id} missing or invalid; set to X"));
            }
            let t = &mut self.sentence.tokens[i];
            if t.deprel.is_none() {
                let d = if t.head == Some(Head::Root) { "root" } else { "dep" };
                t.deprel = Some(d.into());
                self.log(RepairKind::FilledDeprel, Some(id), format!("DEPREL of {id} missing or invalid; set to {d}"));
            }
        }
    }

    /// Sort key for root candidates: lower is better.
    fn root_rank(&self, i: usize, graph: &HeadGraph) -> (u8, isize, i64, usize) {
        let t = &self.sentence.tokens[i];
        let tier = match t.upos {
            Some(Upos::Verb) => 0,
            Some(Upos::Aux) => 1,
            Some(Upos::Noun) | Some(Upos::Pron) => 2,
            _ => 3,
        };
        let deps = if tier == 2 { graph.dependents_count(t.id) as isize } else { 0 };
        let conf = (self.combined(t) * 1e6).round() as i64;
        (tier, -deps, -conf, i)
    }

    fn enforce_single_root(&mut self) {
        let ann = self.annotatable();
        if ann.is_empty() {
            return;
        }
        let graph = HeadGraph::new(&self.sentence);
        let roots: Vec<usize> = ann
            .iter()
            .copied()
            .filter(|&i| self.sentence.tokens[i].head == Some(Head::Root))
            .collect();
        let pool = if roots.is_empty() { &ann } else { &roots };
        let winner = *pool.iter().min_by_key(|&&i| self.root_rank(i, &graph)).expect("non-empty");
        let wid = self.sentence.tokens[winner].id;

        if roots.is_empty() {
            self.sentence.tokens[winner].head = Some(Head::Root);
            self.log(RepairKind::RootPromoted, Some(wid), format!("no root; promoted {wid}"));
        }
        for &i in &roots {
            if i == winner {
                continue;
            }
            let t = &mut self.sentence.tokens[i];
            let id = t.id;
            t.head = Some(Head::Node(wid));
            if t.deprel.as_deref().is_none_or(|d| d == "root") {
                t.deprel = Some("dep".into());
            }
            self.log(RepairKind::RootReattached, Some(id), format!("extra root {id} attached under {wid}"));
        }
        for i in ann {
            let t = &mut self.sentence.tokens[i];
            let id = t.id;
            let want_root = i == winner;
            let is_root_label = t.deprel.as_deref() == Some("root");
            if want_root && !is_root_label {
                let old = t.deprel.replace("root".into()).unwrap_or_default();
                self.log(RepairKind::RootRelabeled, Some(id), format!("root {id} relabeled from {old} to root"));
            } else if !want_root && is_root_label {
                t.deprel = Some("dep".into());
                self.log(RepairKind::RootRelabeled, Some(id), format!("non-root {id} relabeled from root to dep"));
            }
        }
    }

    fn repair_cycles(&mut self) {
        let index = self.sentence.index();
        for _ in 0..=self.sentence.tokens.len() {
            let cycles = HeadGraph::new(&self.sentence).cycles();
            let Some(members) = cycles.first() else { return };
            let root = self.root_token();
            let victim = *members
                .iter()
                .min_by(|a, b| {
                    let (ta, tb) = (&self.sentence.tokens[index[a]], &self.sentence.tokens[index[b]]);
                    self.combined(ta)
                        .total_cmp(&self.combined(tb))
                        .then(index[a].cmp(&index[b]))
                })
                .expect("cycles are non-empty");
            let t = &mut self.sentence.tokens[index[&victim]];
            t.head = Some(root.map_or(Head::Root, Head::Node));
            // A relation set from an upstream spoken label outranks Core and survives reattachment.
            if root.is_none() {
                t.deprel = Some("root".into());
            } else if t.spoken_label.is_none() || t.deprel.is_none() {
                t.deprel = Some("dep".into());
            }
            let members = members.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            self.log(
                RepairKind::CycleBroken,
                Some(victim),
                format!("cycle over {members} broken at {victim}"),
            );
        }
    }
}

fn irreconcilable(reason: impl Into<String>) -> FinalizeError {
    FinalizeError::IrreconcilableEnvelopes { reason: reason.into() }
}

/// Merges SPH, LSR and Core outputs into a single-rooted acyclic parse.
pub fn finalize(
    sph: &SphOutput,
    lsr: &LsrOutput,
    core: &CoreOutput,
    cfg: &VrConfig,
) -> Result<FinalParse, FinalizeError> {
    if lsr.sentence_id != core.sentence_id || lsr.sentence_id != sph.sentence_id {
        return Err(irreconcilable(format!(
            "sentence ids differ: sph {:?}, lsr {:?}, core {:?}",
            sph.sentence_id, lsr.sentence_id, core.sentence_id
        )));
    }
    if lsr.tokens.is_empty() {
        return Err(irreconcilable("the tokenized sentence has no nodes"));
    }
    let mut lsr = lsr.clone();
    lsr.tokens.sort_by_key(|t| t.id);
    if let Some(w) = lsr.tokens.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(irreconcilable(format!("node {} appears twice", w[0].id)));
    }

    let (core, mut repairs) = map_spoken_labels(core, &lsr, sph);
    let comps = lsr.skeleton().mwe_components();
    let nodes: HashSet<NodeId> = lsr.tokens.iter().map(|t| t.id).collect();

    let mut core_by_id: HashMap<NodeId, &CoreToken> = HashMap::new();
    for ct in &core.annotated_tokens {
        if !nodes.contains(&ct.id) {
            repairs.push(Repair::new(
                RepairKind::IgnoredAnnotation,
                Some(ct.id),
                format!("annotation for unknown node {} ignored", ct.id),
            ));
        } else if core_by_id.insert(ct.id, ct).is_some() {
            repairs.push(Repair::new(
                RepairKind::IgnoredAnnotation,
                Some(ct.id),
                format!("duplicate annotation for {} ignored", ct.id),
            ));
        }
    }

    let mut head_forms = HashMap::new();
    let mut tokens = Vec::with_capacity(lsr.tokens.len());
    for et in &lsr.tokens {
        let mut t = Token::new(et.id, et.split_token.clone());
        t.orig_token_index = et.orig_token_index.or_else(|| lsr.orig_of(et.id));
        t.lang_tag = et.lang_tag;
        let (label, anchor) = spoken_of(&lsr, sph, et.id);
        t.spoken_label = label;
        t.spoken_anchor = anchor.filter(|a| nodes.contains(a) && *a != et.id);
        let sph_conf = et
            .sph_confidence
            .or_else(|| translate(&lsr, sph, et.id).and_then(|s| sph.get(s)).and_then(|s| s.sph_confidence));
        for (k, v) in [("sph", sph_conf), ("lsr", et.lsr_confidence)] {
            if let Some(v) = v {
                t.confidences.insert(k.into(), v.clamp(0.0, 1.0));
            }
        }
        t.lemma = et.lemma.clone();
        if let Some(ct) = core_by_id.get(&et.id) {
            if let Some(c) = ct.core_confidence {
                t.confidences.insert("core".into(), c.clamp(0.0, 1.0));
            }
            if ct.lemma.is_some() {
                t.lemma = ct.lemma.clone();
            }
            if comps.contains(&et.id) {
                if ct.is_annotated() {
                    repairs.push(Repair::new(
                        RepairKind::ComponentCleared,
                        Some(et.id),
                        format!("annotation on multiword component {} cleared", et.id),
                    ));
                }
            } else {
                t.upos = ct.parsed_upos();
                t.head = ct.head;
                t.deprel = ct
                    .deprel
                    .as_deref()
                    .filter(|d| cfg.relations.contains(d))
                    .map(canonical_deprel);
                if let Some(f) = &ct.head_form {
                    head_forms.insert(et.id, f.clone());
                }
            }
        }
        tokens.push(t);
    }

    let mut sentence = Sentence::new(lsr.sentence_id.clone(), tokens);
    sentence.metadata.insert(
        "text".into(),
        lsr.original_tokens.join(" "),
    );
    let mut b = Builder {
        sentence,
        repairs,
        comps,
        cfg,
    };
    b.resolve_heads(&head_forms);
    b.fill_labels();
    b.enforce_single_root();
    b.repair_cycles();

    let mut per_node: BTreeMap<NodeId, Vec<RepairKind>> = BTreeMap::new();
    for r in &b.repairs {
        if let Some(n) = r.node {
            per_node.entry(n).or_default().push(r.kind);
        }
    }
    for i in 0..b.sentence.tokens.len() {
        let id = b.sentence.tokens[i].id;
        let kinds = per_node.get(&id).cloned().unwrap_or_default();
        let penalized = kinds.iter().filter(|k| k.penalized()).count();
        let mut c = b.combined(&b.sentence.tokens[i]);
        if penalized > 0 {
            c *= cfg.repaired_factor;
        }
        let t = &mut b.sentence.tokens[i];
        t.confidences.insert(FINAL_CONFIDENCE.into(), c.clamp(0.0, 1.0));
        t.penalty = (cfg.penalty_step * penalized as f64).min(1.0);
        let mut seen = Vec::new();
        for k in kinds {
            if !seen.contains(&k.as_str()) {
                seen.push(k.as_str());
            }
        }
        t.notes = seen.join(";");
    }

    let root = b.root_token();
    let root_desc = root
        .and_then(|r| b.sentence.get(r))
        .map(|t| format!("{} ({})", t.form, t.id))
        .unwrap_or_else(|| "none".into());
    let structural = b.repairs.iter().filter(|r| r.kind.penalized()).count();
    let final_summary = format!(
        "{} nodes, root {root_desc}, {} log entries, {structural} structural repairs",
        b.sentence.tokens.len(),
        b.repairs.len()
    );
    Ok(FinalParse {
        sentence_id: b.sentence.sentence_id.clone(),
        rows: sheet_rows(&b.sentence),
        adjudication_log: b.repairs.iter().map(|r| r.message.clone()).collect(),
        final_summary,
        repairs: b.repairs,
        sentence: b.sentence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decap::envelope::EnvelopeToken;
    use crate::ud::validate_tree;

    fn env(forms: &[&str]) -> StageEnvelope {
        StageEnvelope {
            sentence_id: "s".into(),
            original_tokens: forms.iter().map(|f| f.to_string()).collect(),
            tokens: forms
                .iter()
                .enumerate()
                .map(|(i, f)| EnvelopeToken::new(NodeId::int(i as u32 + 1), Some(i as u32 + 1), *f))
                .collect(),
            proposed_id_map: (1..=forms.len() as u32).map(|i| (i, vec![NodeId::int(i)])).collect(),
            summary_notes: String::new(),
            confidence: None,
        }
    }

    fn ct(id: NodeId, form: &str, upos: &str, head: Option<Head>, deprel: &str) -> CoreToken {
        CoreToken {
            id,
            form: form.into(),
            lemma: None,
            upos: (!upos.is_empty()).then(|| upos.into()),
            head,
            head_form: None,
            deprel: (!deprel.is_empty()).then(|| deprel.into()),
            core_confidence: Some(0.9),
            core_notes: String::new(),
        }
    }

    fn n(i: u32) -> NodeId {
        NodeId::int(i)
    }

    fn core(tokens: Vec<CoreToken>) -> CoreOutput {
        CoreOutput {
            sentence_id: "s".into(),
            annotated_tokens: tokens,
            summary_notes: String::new(),
        }
    }

    fn kinds(p: &FinalParse) -> Vec<RepairKind> {
        p.repairs.iter().map(|r| r.kind).collect()
    }

    #[test]
    fn clean_input_passes_through() {
        let e = env(&["I", "eat"]);
        let c = core(vec![
            ct(n(1), "I", "PRON", Some(Head::Node(n(2))), "nsubj"),
            ct(n(2), "eat", "VERB", Some(Head::Root), "root"),
        ]);
        let p = finalize(&e, &e, &c, &VrConfig::default()).unwrap();
        assert!(p.repairs.is_empty());
        assert!(validate_tree(&p.sentence).ok);
        assert_eq!(p.rows[0].penalty, 0.0);
        assert!((p.rows[0].final_confidence.unwrap() - (0.45 + 0.15 + 0.1)).abs() < 1e-9);
    }

    #[test]
    fn two_roots_prefers_the_verb() {
        let e = env(&["dog", "runs"]);
        let c = core(vec![
            ct(n(1), "dog", "NOUN", Some(Head::Root), "root"),
            ct(n(2), "runs", "VERB", Some(Head::Root), "root"),
        ]);
        let p = finalize(&e, &e, &c, &VrConfig::default()).unwrap();
        assert_eq!(p.sentence.roots(), vec![n(2)]);
        assert_eq!(p.sentence.tokens[0].head, Some(Head::Node(n(2))));
        assert_eq!(p.sentence.tokens[0].deprel.as_deref(), Some("dep"));
        assert_eq!(p.rows[0].penalty, 0.25);
        assert_eq!(p.rows[0].adjudication_note, "root_reattached");
    }

    #[test]
    fn no_root_promotes_and_cycle_is_broken() {
        let e = env(&["a", "b", "c"]);
        let c = core(vec![
            ct(n(1), "a", "NOUN", Some(Head::Node(n(2))), "nsubj"),
            ct(n(2), "b", "VERB", Some(Head::Node(n(1))), "obj"),
            ct(n(3), "c", "ADV", Some(Head::Node(n(2))), "advmod"),
        ]);
        let p = finalize(&e, &e, &c, &VrConfig::default()).unwrap();
        assert!(validate_tree(&p.sentence).ok, "{:?}", validate_tree(&p.sentence));
        assert_eq!(p.sentence.roots(), vec![n(2)]);
        assert!(kinds(&p).contains(&RepairKind::RootPromoted));
    }

    #[test]
    fn invalid_head_resolved_by_form_then_root() {
        let e = env(&["I", "eat", "now"]);
        let mut t1 = ct(n(1), "I", "PRON", Some(Head::Node(n(9))), "nsubj");
        t1.head_form = Some("EAT".into());
        let c = core(vec![
            t1,
            ct(n(2), "eat", "VERB", Some(Head::Root), "root"),
            ct(n(3), "now", "", None, ""),
        ]);
        let p = finalize(&e, &e, &c, &VrConfig::default()).unwrap();
        assert_eq!(p.sentence.tokens[0].head, Some(Head::Node(n(2))));
        assert_eq!(p.sentence.tokens[2].head, Some(Head::Node(n(2))));
        assert_eq!(p.sentence.tokens[2].upos, Some(Upos::X));
        assert_eq!(p.sentence.tokens[2].deprel.as_deref(), Some("dep"));
        assert!(validate_tree(&p.sentence).ok);
    }

    #[test]
    fn spoken_labels_override_core() {
        let mut s = env(&["I", "I", "buy", "uh"]);
        s.tokens[0].spoken_label = Some(SpokenLabel::Reparandum);
        s.tokens[0].spoken_anchor = Some(n(2));
        s.tokens[3].spoken_label = Some(SpokenLabel::Filler);
        let l = env(&["I", "I", "buy", "uh"]);
        let c = core(vec![
            ct(n(1), "I", "PRON", Some(Head::Node(n(3))), "nsubj"),
            ct(n(2), "I", "PRON", Some(Head::Node(n(3))), "nsubj"),
            ct(n(3), "buy", "VERB", Some(Head::Root), "root"),
            ct(n(4), "uh", "NOUN", Some(Head::Node(n(3))), "obj"),
        ]);
        let p = finalize(&s, &l, &c, &VrConfig::default()).unwrap();
        let t = &p.sentence.tokens;
        assert_eq!((t[0].head, t[0].deprel.as_deref()), (Some(Head::Node(n(2))), Some("reparandum")));
        assert_eq!((t[3].upos, t[3].deprel.as_deref()), (Some(Upos::Intj), Some("discourse")));
        assert_eq!(t[0].penalty, 0.0);
        assert_eq!(p.adjudication_log.len(), 2);
    }

    #[test]
    fn whitelist_creates_dotted_node() {
        let mut l = env(&["I", "want", "Pitta", "bread", "you", "know"]);
        let r = apply_whitelist(&mut l, &["pitta bread".into(), "you know".into(), "a lot".into()]);
        assert_eq!(r.len(), 2);
        assert_eq!(l.get(NodeId::dotted(3, 1)).unwrap().split_token, "Pitta_bread");
        assert!(l.get(NodeId::dotted(5, 1)).is_some());
    }

    #[test]
    fn mwe_components_stay_empty() {
        let mut l = env(&["pitta", "bread"]);
        l.make_dotted_mwe(&[n(1), n(2)]).unwrap();
        let c = core(vec![
            ct(n(1), "pitta", "NOUN", Some(Head::Root), "root"),
            ct(NodeId::dotted(1, 1), "pitta_bread", "NOUN", Some(Head::Root), "root"),
        ]);
        let p = finalize(&l, &l, &c, &VrConfig::default()).unwrap();
        assert!(validate_tree(&p.sentence).ok);
        assert!(kinds(&p).contains(&RepairKind::ComponentCleared));
        assert_eq!(p.rows[0].upos, "");
        assert_eq!(p.rows[0].form, "");
    }

    #[test]
    fn mismatched_ids_are_irreconcilable() {
        let e = env(&["a"]);
        let mut c = core(vec![]);
        c.sentence_id = "other".into();
        assert!(matches!(
            finalize(&e, &e, &c, &VrConfig::default()),
            Err(FinalizeError::IrreconcilableEnvelopes { .. })
        ));
    }
}
