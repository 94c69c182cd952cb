//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

use spokeud_core::decap::{CoreOutput, CoreToken, EnvelopeToken, IdMap, StageEnvelope};
use spokeud_core::ud::{Category, Head, LangTag, NodeId, Sentence, SpokenLabel, Token, Upos};

pub const FORMS: &[&str] = &[
    "I", "you", "she", "we", "the", "store", "buy", "want", "go", "uh", "um", "like", "yo", "ella", "quiero", "la",
    "tienda", "bueno", "pues", "jugo", "más", "niño", "café", "don't", "del", "al", "pitta", "bread", "know", "lot",
    "a", "es", "verdad", "¿qué", "eh", "O'Brien", "x-ray",
];

pub const DEPRELS: &[&str] = &[
    "nsubj", "obj", "obl", "iobj", "advmod", "amod", "det", "case", "aux", "cop", "mark", "cc", "conj", "discourse",
    "reparandum", "parataxis", "compound", "xcomp", "ccomp", "punct", "nmod", "dep", "nsubj:pass", "obl:tmod",
];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn lang(rng: &mut StdRng) -> LangTag {
    *[LangTag::Eng, LangTag::Spa, LangTag::Mixed, LangTag::Unknown].choose(rng).unwrap()
}

fn label(rng: &mut StdRng) -> Option<SpokenLabel> {
    if rng.random_bool(0.75) {
        None
    } else {
        Some(
            *[SpokenLabel::Reparandum, SpokenLabel::Discourse, SpokenLabel::Filler, SpokenLabel::Dep]
                .choose(rng)
                .unwrap(),
        )
    }
}

/// A well-formed annotated tree with optional dotted multiword nodes.
pub fn random_sentence(rng: &mut StdRng, id: &str) -> Sentence {
    let n = rng.random_range(1..=12u32);
    let forms: Vec<String> = (0..n).map(|_| FORMS.choose(rng).unwrap().to_string()).collect();
    let mut tokens = Vec::new();
    let mut mwe_at = None;
    if n >= 2 && rng.random_bool(0.35) {
        mwe_at = Some(rng.random_range(1..n));
    }
    for i in 1..=n {
        let mut t = Token::new(NodeId::int(i), forms[i as usize - 1].clone());
        t.orig_token_index = Some(i);
        t.lang_tag = lang(rng);
        tokens.push(t);
        if mwe_at == Some(i) {
            let form = format!("{}_{}", forms[i as usize - 1], forms[i as usize]);
            let mut d = Token::new(NodeId::dotted(i, 1), form);
            d.orig_token_index = Some(i);
            d.lang_tag = lang(rng);
            tokens.push(d);
        }
    }
    let mut s = Sentence::new(id, tokens);
    let comps = s.mwe_components();
    let annotatable: Vec<NodeId> = s.tokens.iter().map(|t| t.id).filter(|id| !comps.contains(id)).collect();

    // Random tree: shuffle, first node is the root, each later node hangs
    // off one placed before it.
    let mut order = annotatable.clone();
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut heads = BTreeMap::new();
    for (k, id) in order.iter().enumerate() {
        let head = if k == 0 { Head::Root } else { Head::Node(order[rng.random_range(0..k)]) };
        heads.insert(*id, head);
    }
    for t in s.tokens.iter_mut().filter(|t| !comps.contains(&t.id)) {
        let head = heads[&t.id];
        t.head = Some(head);
        t.upos = Some(*Upos::ALL.choose(rng).unwrap());
        t.deprel = Some(if head.is_root() { "root".to_string() } else { DEPRELS.choose(rng).unwrap().to_string() });
        if rng.random_bool(0.7) {
            t.lemma = Some(t.form.to_lowercase());
        }
        t.spoken_label = label(rng);
        if t.spoken_label.is_some() && rng.random_bool(0.5) {
            t.spoken_anchor = annotatable.iter().copied().find(|a| *a != t.id);
        }
        if rng.random_bool(0.1) {
            t.misc = Some("SpaceAfter=No".into());
        }
        if rng.random_bool(0.1) {
            t.feats = Some("Number=Sing".into());
        }
    }
    if rng.random_bool(0.8) {
        s.category = Some(*Category::ALL.choose(rng).unwrap());
    }
    if rng.random_bool(0.5) {
        s.metadata.insert("text".into(), forms.join(" "));
    }
    s
}

/// Consistent SPH and LSR envelopes for a random transcription. Some
/// contractions are split by SPH, others only by LSR, and LSR may add a
/// dotted multiword node.
pub struct Envelopes {
    pub original: Vec<String>,
    pub sph: StageEnvelope,
    pub lsr: StageEnvelope,
}

pub fn random_envelopes(rng: &mut StdRng, id: &str) -> Envelopes {
    let m = rng.random_range(1..=10u32);
    let original: Vec<String> = (0..m).map(|_| FORMS.choose(rng).unwrap().to_string()).collect();
    // 0 = unsplit, 1 = split by SPH, 2 = split by LSR.
    let plan: Vec<u8> = (0..m).map(|_| if rng.random_bool(0.2) { rng.random_range(1..=2) } else { 0 }).collect();
    let build = |split_stage: &dyn Fn(u8) -> bool| {
        let mut tokens = Vec::new();
        let mut map = IdMap::new();
        let mut next = 1;
        for (i, form) in original.iter().enumerate() {
            let o = i as u32 + 1;
            let parts: Vec<String> = if split_stage(plan[i]) {
                vec![format!("{form}a"), format!("{form}b")]
            } else {
                vec![form.clone()]
            };
            for p in parts {
                tokens.push(EnvelopeToken::new(NodeId::int(next), Some(o), p));
                map.entry(o).or_default().push(NodeId::int(next));
                next += 1;
            }
        }
        (tokens, map)
    };
    let (sph_tokens, sph_map) = build(&|p| p == 1);
    let (lsr_tokens, lsr_map) = build(&|p| p != 0);
    let mut sph = StageEnvelope {
        sentence_id: id.to_string(),
        original_tokens: original.clone(),
        tokens: sph_tokens,
        proposed_id_map: sph_map,
        summary_notes: String::new(),
        confidence: Some(0.9),
    };
    let mut lsr = StageEnvelope {
        sentence_id: id.to_string(),
        original_tokens: original.clone(),
        tokens: lsr_tokens,
        proposed_id_map: lsr_map,
        summary_notes: String::new(),
        confidence: Some(0.85),
    };
    let sph_ids: Vec<NodeId> = sph.tokens.iter().map(|t| t.id).collect();
    for t in sph.tokens.iter_mut() {
        t.lang_tag = lang(rng);
        t.sph_confidence = rng.random_bool(0.8).then(|| rng.random_range(0.0..=1.0));
        t.spoken_label = label(rng);
        if t.spoken_label.is_some() && rng.random_bool(0.6) {
            t.spoken_anchor = sph_ids.choose(rng).copied().filter(|a| *a != t.id);
        }
    }
    for t in lsr.tokens.iter_mut() {
        t.lang_tag = lang(rng);
        t.lsr_confidence = rng.random_bool(0.8).then(|| rng.random_range(0.0..=1.0));
        if rng.random_bool(0.5) {
            t.lemma = Some(t.split_token.to_lowercase());
        }
    }
    let n = lsr.tokens.len() as u32;
    if n >= 2 && rng.random_bool(0.3) {
        let start = rng.random_range(1..n);
        lsr.make_dotted_mwe(&[NodeId::int(start), NodeId::int(start + 1)]).unwrap();
    }
    Envelopes { original, sph, lsr }
}

/// A Core reply written by an adversary: arbitrary heads, missing or
/// duplicated rows, unknown tags and annotated multiword components.
pub fn adversarial_core(rng: &mut StdRng, lsr: &StageEnvelope) -> CoreOutput {
    let ids: Vec<NodeId> = lsr.tokens.iter().map(|t| t.id).collect();
    let forms: Vec<&str> = lsr.tokens.iter().map(|t| t.split_token.as_str()).collect();
    let mut rows = Vec::new();
    for t in &lsr.tokens {
        if rng.random_bool(0.08) {
            continue;
        }
        let head = match rng.random_range(0..10) {
            0 | 1 => Some(Head::Root),
            2 => None,
            3 => Some(Head::Node(t.id)),
            4 => Some(Head::Node(NodeId::int(rng.random_range(1..40)))),
            5 => Some(Head::Node(NodeId::dotted(rng.random_range(1..12), 1))),
            _ => Some(Head::Node(*ids.choose(rng).unwrap())),
        };
        let head_form = match rng.random_range(0..4) {
            0 => None,
            1 => Some("root".to_string()),
            _ => Some(forms.choose(rng).unwrap().to_string()),
        };
        let upos = match rng.random_range(0..8) {
            0 => None,
            1 => Some("NOUNISH".to_string()),
            _ => Some(Upos::ALL.choose(rng).unwrap().as_str().to_string()),
        };
        let deprel = match rng.random_range(0..8) {
            0 => None,
            1 => Some("subject".to_string()),
            2 => Some("root".to_string()),
            _ => Some(DEPRELS.choose(rng).unwrap().to_string()),
        };
        let row = CoreToken {
            id: t.id,
            form: t.split_token.clone(),
            lemma: rng.random_bool(0.5).then(|| t.split_token.to_lowercase()),
            upos,
            head,
            head_form,
            deprel,
            core_confidence: match rng.random_range(0..5) {
                0 => None,
                1 => Some(1.7),
                _ => Some(rng.random_range(0.0..=1.0)),
            },
            core_notes: String::new(),
        };
        if rng.random_bool(0.05) {
            rows.push(row.clone());
        }
        rows.push(row);
    }
    if rng.random_bool(0.1) {
        let mut ghost = rows.first().cloned().unwrap_or(CoreToken {
            id: NodeId::int(1),
            form: "ghost".into(),
            lemma: None,
            upos: None,
            head: None,
            head_form: None,
            deprel: None,
            core_confidence: None,
            core_notes: String::new(),
        });
        ghost.id = NodeId::int(ids.len() as u32 + 5);
        rows.push(ghost);
    }
    CoreOutput {
        sentence_id: lsr.sentence_id.clone(),
        annotated_tokens: rows,
        summary_notes: String::new(),
    }
}

fn remap(s: &mut Sentence, f: impl Fn(NodeId) -> Option<NodeId>) {
    for t in s.tokens.iter_mut() {
        t.id = f(t.id).expect("token ids survive remapping");
        t.head = match t.head {
            Some(Head::Node(h)) => Some(f(h).map(Head::Node).unwrap_or(Head::Root)),
            other => other,
        };
        t.spoken_anchor = t.spoken_anchor.and_then(&f);
    }
}

/// A system-side copy of `gold` with random damage: relabeling, bad heads,
/// cycles, extra roots, a dropped multiword node, split or deleted tokens.
pub fn perturb(rng: &mut StdRng, gold: &Sentence) -> Sentence {
    let mut s = gold.clone();
    let edits = rng.random_range(0..=4);
    for _ in 0..edits {
        let comps = s.mwe_components();
        let annotatable: Vec<NodeId> = s.tokens.iter().map(|t| t.id).filter(|id| !comps.contains(id)).collect();
        if annotatable.is_empty() {
            break;
        }
        let target = *annotatable.choose(rng).unwrap();
        match rng.random_range(0..9) {
            0 => s.get_mut(target).unwrap().upos = Some(*Upos::ALL.choose(rng).unwrap()),
            1 => s.get_mut(target).unwrap().deprel = Some(DEPRELS.choose(rng).unwrap().to_string()),
            2 => s.get_mut(target).unwrap().head = Some(Head::Node(*annotatable.choose(rng).unwrap())),
            3 => s.get_mut(target).unwrap().head = Some(Head::Root),
            4 => s.get_mut(target).unwrap().head = Some(Head::Node(NodeId::int(99))),
            5 => {
                // Drop the dotted node and annotate its components instead.
                if let Some(span) = s.mwe_spans().into_iter().next() {
                    let head = s.get(span.node).and_then(|t| t.head);
                    s.tokens.retain(|t| t.id != span.node);
                    for c in &span.components {
                        let t = s.get_mut(*c).unwrap();
                        t.upos = Some(Upos::Noun);
                        t.head = head.filter(|h| h.node() != Some(*c)).or(Some(Head::Root));
                        t.deprel = Some("compound".into());
                    }
                    remap(&mut s, |id| Some(if id == span.node { span.components[0] } else { id }));
                }
            }
            6 => {
                // Split an integer token outside any multiword span.
                if target.is_integer() && s.mwe_spans().is_empty() {
                    let form = s.get(target).unwrap().form.clone();
                    let chars: Vec<char> = form.chars().collect();
                    if chars.len() >= 2 {
                        let cut = chars.len() / 2;
                        let (a, b): (String, String) = (chars[..cut].iter().collect(), chars[cut..].iter().collect());
                        let k = target.major();
                        remap(&mut s, |id| Some(if id.major() > k { id.shifted(1) } else { id }));
                        let pos = s.position(target).unwrap();
                        s.tokens[pos].form = a;
                        let mut extra = Token::new(NodeId::int(k + 1), b);
                        extra.upos = Some(Upos::X);
                        extra.head = Some(Head::Node(target));
                        extra.deprel = Some("goeswith".into());
                        extra.orig_token_index = s.tokens[pos].orig_token_index;
                        s.tokens.insert(pos + 1, extra);
                    }
                }
            }
            7 => {
                // Delete a token; dependents fall back to the root.
                if target.is_integer() && s.mwe_spans().is_empty() && s.tokens.len() > 1 {
                    let k = target.major();
                    s.tokens.retain(|t| t.id != target);
                    remap(&mut s, |id| {
                        if id == target {
                            None
                        } else if id.major() > k {
                            Some(NodeId::new(id.major() - 1, id.minor()).unwrap())
                        } else {
                            Some(id)
                        }
                    });
                }
            }
            _ => {
                // Two-node cycle.
                let other = *annotatable.choose(rng).unwrap();
                if other != target {
                    s.get_mut(target).unwrap().head = Some(Head::Node(other));
                    s.get_mut(other).unwrap().head = Some(Head::Node(target));
                }
            }
        }
    }
    s
}

/// Turns an adversarial reply into one the Core checks accept while keeping
/// the structural damage: dangling heads, self loops, cycles and heads on
/// multiword components all survive.
pub fn passable(rng: &mut StdRng, core: &CoreOutput, lsr: &StageEnvelope) -> CoreOutput {
    let comps = lsr.skeleton().mwe_components();
    let mut seen = HashSet::new();
    let mut rows: Vec<_> = core
        .annotated_tokens
        .iter()
        .filter(|t| lsr.get(t.id).is_some() && seen.insert(t.id))
        .cloned()
        .collect();
    for t in &lsr.tokens {
        if !seen.contains(&t.id) {
            rows.push(CoreToken {
                id: t.id,
                form: t.split_token.clone(),
                lemma: None,
                upos: Some("X".into()),
                head: Some(Head::Node(lsr.tokens.choose(rng).unwrap().id)),
                head_form: None,
                deprel: Some("dep".into()),
                core_confidence: None,
                core_notes: String::new(),
            });
        }
    }
    rows.sort_by_key(|r| r.id);
    for r in rows.iter_mut() {
        if comps.contains(&r.id) {
            r.upos = None;
            r.head = None;
            r.head_form = None;
            r.deprel = None;
            continue;
        }
        if r.upos.as_deref().is_some_and(|u| u.parse::<Upos>().is_err()) {
            r.upos = Some("X".into());
        }
        if r.deprel.as_deref() == Some("subject") {
            r.deprel = Some("dep".into());
        }
        r.core_confidence = r.core_confidence.map(|c| c.clamp(0.0, 1.0));
    }
    let annot: Vec<usize> = (0..rows.len()).filter(|i| !comps.contains(&rows[*i].id)).collect();
    let roots: Vec<usize> = annot.iter().copied().filter(|i| rows[*i].head == Some(Head::Root)).collect();
    if roots.is_empty() {
        let i = *annot.choose(rng).unwrap();
        rows[i].head = Some(Head::Root);
    }
    for i in roots.iter().skip(1) {
        let other = rows[*annot.choose(rng).unwrap()].id;
        rows[*i].head = Some(Head::Node(other));
    }
    CoreOutput {
        sentence_id: core.sentence_id.clone(),
        annotated_tokens: rows,
        summary_notes: String::new(),
    }
}
