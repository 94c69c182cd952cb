use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::node_id::{Head, NodeId};
use super::tags::{Category, LangTag, SpokenLabel, Upos};

/// One node of a spoken-UD sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub id: NodeId,
    /// Position in the source transcription, when known.
    pub orig_token_index: Option<u32>,
    pub form: String,
    pub lemma: Option<String>,
    pub upos: Option<Upos>,
    pub xpos: Option<String>,
    pub feats: Option<String>,
    pub head: Option<Head>,
    pub deprel: Option<String>,
    pub deps: Option<String>,
    /// MISC entries other than the ones the model lifts into typed fields.
    pub misc: Option<String>,
    pub lang_tag: LangTag,
    pub spoken_label: Option<SpokenLabel>,
    pub spoken_anchor: Option<NodeId>,
    /// Per-stage confidence, keyed by stage name (`sph`, `lsr`, `core`, `final`).
    pub confidences: BTreeMap<String, f64>,
    pub penalty: f64,
    pub notes: String,
}

impl Token {
    pub fn new(id: NodeId, form: impl Into<String>) -> Self {
        Token {
            id,
            orig_token_index: None,
            form: form.into(),
            lemma: None,
            upos: None,
            xpos: None,
            feats: None,
            head: None,
            deprel: None,
            deps: None,
            misc: None,
            lang_tag: LangTag::Unknown,
            spoken_label: None,
            spoken_anchor: None,
            confidences: BTreeMap::new(),
            penalty: 0.0,
            notes: String::new(),
        }
    }

    /// Builder-style shorthand used heavily in fixtures.
    pub fn annotated(id: NodeId, form: &str, upos: Upos, head: Head, deprel: &str) -> Self {
        let mut t = Token::new(id, form);
        t.upos = Some(upos);
        t.head = Some(head);
        t.deprel = Some(deprel.to_string());
        t
    }

    pub fn has_annotation(&self) -> bool {
        self.upos.is_some() || self.head.is_some() || self.deprel.is_some()
    }
}

/// A sentence: tokens in strictly increasing [`NodeId`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub sentence_id: String,
    pub tokens: Vec<Token>,
    pub category: Option<Category>,
    pub metadata: BTreeMap<String, String>,
}

/// A dotted multiword node together with the integer rows it spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MweSpan {
    pub node: NodeId,
    pub components: Vec<NodeId>,
}

impl Sentence {
    pub fn new(sentence_id: impl Into<String>, tokens: Vec<Token>) -> Self {
        Sentence {
            sentence_id: sentence_id.into(),
            tokens,
            category: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.tokens.iter().position(|t| t.id == id)
    }

    pub fn get(&self, id: NodeId) -> Option<&Token> {
        self.tokens.iter().find(|t| t.id == id)
    }

    pub fn get_mut(&mut self, id: NodeId) -> Option<&mut Token> {
        self.tokens.iter_mut().find(|t| t.id == id)
    }

    pub fn index(&self) -> HashMap<NodeId, usize> {
        self.tokens.iter().enumerate().map(|(i, t)| (t.id, i)).collect()
    }

    /// Dotted nodes whose form joins two or more underscore-separated parts,
    /// with the integer rows `major, major+1, ...` they cover.
    pub fn mwe_spans(&self) -> Vec<MweSpan> {
        let present: BTreeSet<NodeId> = self.tokens.iter().map(|t| t.id).collect();
        self.tokens
            .iter()
            .filter(|t| t.id.is_dotted())
            .filter_map(|t| {
                let parts = mwe_part_count(&t.form);
                if parts < 2 {
                    return None;
                }
                let components = (0..parts as u32)
                    .map(|k| NodeId::int(t.id.major() + k))
                    .filter(|id| present.contains(id))
                    .collect();
                Some(MweSpan {
                    node: t.id,
                    components,
                })
            })
            .collect()
    }

    /// Integer rows covered by a dotted multiword node; these carry no annotation.
    pub fn mwe_components(&self) -> BTreeSet<NodeId> {
        self.mwe_spans().into_iter().flat_map(|s| s.components).collect()
    }

    /// Tokens that receive UPOS/HEAD/DEPREL (everything except MWE component rows).
    pub fn annotatable(&self) -> Vec<&Token> {
        let comps = self.mwe_components();
        self.tokens.iter().filter(|t| !comps.contains(&t.id)).collect()
    }

    pub fn roots(&self) -> Vec<NodeId> {
        let comps = self.mwe_components();
        self.tokens
            .iter()
            .filter(|t| !comps.contains(&t.id) && t.head == Some(Head::Root))
            .map(|t| t.id)
            .collect()
    }
}

/// Number of non-empty underscore-separated parts in a form.
pub fn mwe_part_count(form: &str) -> usize {
    form.split('_').filter(|p| !p.is_empty()).count()
}
