//! Stage envelopes exchanged with the model and between pipeline stages.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use crate::ud::{Head, LangTag, NodeId, Sentence, SpokenLabel, Upos};

/// Original token index to the proposed nodes it became, in node order.
pub type IdMap = BTreeMap<u32, Vec<NodeId>>;

fn de_lang<'de, D: Deserializer<'de>>(d: D) -> Result<LangTag, D::Error> {
    let s: Option<String> = Option::deserialize(d)?;
    s.unwrap_or_default().parse().map_err(serde::de::Error::custom)
}

fn de_label<'de, D: Deserializer<'de>>(d: D) -> Result<Option<SpokenLabel>, D::Error> {
    let s: Option<String> = Option::deserialize(d)?;
    SpokenLabel::parse_opt(s.as_deref().unwrap_or("")).map_err(serde::de::Error::custom)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Loose {
    Int(u64),
    Str(String),
}

fn loose_text<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    let v: Option<Loose> = Option::deserialize(d)?;
    Ok(match v {
        None => None,
        Some(Loose::Int(n)) => Some(n.to_string()),
        Some(Loose::Str(s)) if s.trim().is_empty() => None,
        Some(Loose::Str(s)) => Some(s.trim().to_string()),
    })
}

fn de_opt_node<'de, D: Deserializer<'de>>(d: D) -> Result<Option<NodeId>, D::Error> {
    loose_text(d)?
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .transpose()
}

fn de_opt_head<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Head>, D::Error> {
    loose_text(d)?
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .transpose()
}

fn de_opt_text<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    let s: Option<String> = Option::deserialize(d)?;
    Ok(s.filter(|s| !s.trim().is_empty()))
}

fn de_text<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    Ok(Option::<String>::deserialize(d)?.unwrap_or_default())
}

/// One proposed node in an SPH or LSR envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeToken {
    #[serde(rename = "proposed_ID")]
    pub id: NodeId,
    #[serde(default)]
    pub orig_token_index: Option<u32>,
    pub split_token: String,
    #[serde(default, deserialize_with = "de_lang")]
    pub lang_tag: LangTag,
    #[serde(default, deserialize_with = "de_label", skip_serializing_if = "Option::is_none")]
    pub spoken_label: Option<SpokenLabel>,
    #[serde(default, deserialize_with = "de_opt_node", skip_serializing_if = "Option::is_none")]
    pub spoken_anchor: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sph_confidence: Option<f64>,
    #[serde(default, deserialize_with = "de_opt_text", skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lsr_confidence: Option<f64>,
    #[serde(default, deserialize_with = "de_opt_text", skip_serializing_if = "Option::is_none")]
    pub lsr_notes: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mwe: Option<bool>,
}

impl EnvelopeToken {
    pub fn new(id: NodeId, orig: Option<u32>, form: impl Into<String>) -> Self {
        EnvelopeToken {
            id,
            orig_token_index: orig,
            split_token: form.into(),
            lang_tag: LangTag::Unknown,
            spoken_label: None,
            spoken_anchor: None,
            sph_confidence: None,
            lemma: None,
            lsr_confidence: None,
            lsr_notes: None,
            mwe: None,
        }
    }
}

/// The shape shared by the SPH and LSR stage outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEnvelope {
    pub sentence_id: String,
    #[serde(default)]
    pub original_tokens: Vec<String>,
    pub tokens: Vec<EnvelopeToken>,
    pub proposed_id_map: IdMap,
    #[serde(default, deserialize_with = "de_text")]
    pub summary_notes: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

pub type SphOutput = StageEnvelope;
pub type LsrOutput = StageEnvelope;

impl StageEnvelope {
    pub fn get(&self, id: NodeId) -> Option<&EnvelopeToken> {
        self.tokens.iter().find(|t| t.id == id)
    }

    /// The node list as a bare sentence, for MWE-span queries.
    pub fn skeleton(&self) -> Sentence {
        Sentence::new(
            self.sentence_id.clone(),
            self.tokens
                .iter()
                .map(|t| crate::ud::Token::new(t.id, t.split_token.clone()))
                .collect(),
        )
    }

    /// Original index owning a node, according to the id map.
    pub fn orig_of(&self, id: NodeId) -> Option<u32> {
        self.proposed_id_map
            .iter()
            .find(|(_, ids)| ids.contains(&id))
            .map(|(o, _)| *o)
    }
}

/// One annotated node in a Core envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreToken {
    #[serde(rename = "proposed_ID")]
    pub id: NodeId,
    #[serde(rename = "FORM", default, deserialize_with = "de_text")]
    pub form: String,
    #[serde(rename = "LEMMA", default, deserialize_with = "de_opt_text")]
    pub lemma: Option<String>,
    #[serde(rename = "UPOS", default, deserialize_with = "de_opt_text")]
    pub upos: Option<String>,
    #[serde(rename = "HEAD_ID", default, deserialize_with = "de_opt_head")]
    pub head: Option<Head>,
    #[serde(rename = "HEAD_FORM", default, deserialize_with = "de_opt_text")]
    pub head_form: Option<String>,
    #[serde(rename = "DEPREL", default, deserialize_with = "de_opt_text")]
    pub deprel: Option<String>,
    #[serde(default)]
    pub core_confidence: Option<f64>,
    #[serde(default, deserialize_with = "de_text")]
    pub core_notes: String,
}

impl CoreToken {
    pub fn parsed_upos(&self) -> Option<Upos> {
        self.upos.as_deref().and_then(|u| u.parse().ok())
    }

    pub fn is_annotated(&self) -> bool {
        self.upos.is_some() || self.head.is_some() || self.deprel.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreOutput {
    pub sentence_id: String,
    pub annotated_tokens: Vec<CoreToken>,
    #[serde(default, deserialize_with = "de_text")]
    pub summary_notes: String,
}

impl CoreOutput {
    pub fn get(&self, id: NodeId) -> Option<&CoreToken> {
        self.annotated_tokens.iter().find(|t| t.id == id)
    }
}
