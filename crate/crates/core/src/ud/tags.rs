use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("unknown UPOS tag {0:?}")]
    Upos(String),
    #[error("unknown language tag {0:?}")]
    Lang(String),
    #[error("unknown spoken label {0:?}")]
    Spoken(String),
    #[error("unknown category {0:?}")]
    Category(String),
}

macro_rules! upos_tags {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// The 17 universal part-of-speech tags.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum Upos {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl Upos {
            pub const ALL: [Upos; 17] = [$(Upos::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Upos::$variant => $name,)*
                }
            }
        }

        impl FromStr for Upos {
            type Err = TagError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim().to_ascii_uppercase().as_str() {
                    $($name => Ok(Upos::$variant),)*
                    _ => Err(TagError::Upos(s.to_string())),
                }
            }
        }
    };
}

upos_tags! {
    Adj => "ADJ",
    Adp => "ADP",
    Adv => "ADV",
    Aux => "AUX",
    Cconj => "CCONJ",
    Det => "DET",
    Intj => "INTJ",
    Noun => "NOUN",
    Num => "NUM",
    Part => "PART",
    Pron => "PRON",
    Propn => "PROPN",
    Punct => "PUNCT",
    Sconj => "SCONJ",
    Sym => "SYM",
    Verb => "VERB",
    X => "X",
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Language of a token in a code-switched utterance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LangTag {
    Eng,
    Spa,
    Mixed,
    #[default]
    Unknown,
}

impl LangTag {
    pub fn as_str(self) -> &'static str {
        match self {
            LangTag::Eng => "eng",
            LangTag::Spa => "spa",
            LangTag::Mixed => "mixed",
            LangTag::Unknown => "unknown",
        }
    }
}

impl FromStr for LangTag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eng" | "en" | "english" => Ok(LangTag::Eng),
            "spa" | "es" | "spanish" => Ok(LangTag::Spa),
            "mixed" | "mix" | "both" => Ok(LangTag::Mixed),
            "unknown" | "unk" | "" => Ok(LangTag::Unknown),
            _ => Err(TagError::Lang(s.to_string())),
        }
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Spoken-language phenomenon attached to a token upstream of parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpokenLabel {
    Reparandum,
    Dep,
    Discourse,
    Filler,
}

impl SpokenLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SpokenLabel::Reparandum => "reparandum",
            SpokenLabel::Dep => "dep",
            SpokenLabel::Discourse => "discourse",
            SpokenLabel::Filler => "filler",
        }
    }

    /// Parses a label; `none` (or empty) means no label.
    pub fn parse_opt(s: &str) -> Result<Option<Self>, TagError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "none" | "null" => Ok(None),
            "reparandum" | "rep" => Ok(Some(SpokenLabel::Reparandum)),
            "dep" => Ok(Some(SpokenLabel::Dep)),
            "discourse" => Ok(Some(SpokenLabel::Discourse)),
            "filler" => Ok(Some(SpokenLabel::Filler)),
            _ => Err(TagError::Spoken(s.to_string())),
        }
    }
}

impl fmt::Display for SpokenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Benchmark category, by dominant spoken phenomenon and complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "simple-repetition")]
    SimpleRepetition,
    #[serde(rename = "complex-repetition")]
    ComplexRepetition,
    #[serde(rename = "contraction-en")]
    ContractionEn,
    #[serde(rename = "contraction-es")]
    ContractionEs,
    #[serde(rename = "simple-ellipsis")]
    SimpleEllipsis,
    #[serde(rename = "complex-ellipsis")]
    ComplexEllipsis,
    #[serde(rename = "simple-discourse")]
    SimpleDiscourse,
    #[serde(rename = "complex-discourse")]
    ComplexDiscourse,
    #[serde(rename = "highly-complex")]
    HighlyComplex,
    #[serde(rename = "none")]
    None,
}

impl Category {
    /// Report order; `None` (the control set) comes last.
    pub const ALL: [Category; 10] = [
        Category::SimpleRepetition,
        Category::ComplexRepetition,
        Category::ContractionEn,
        Category::ContractionEs,
        Category::SimpleEllipsis,
        Category::ComplexEllipsis,
        Category::SimpleDiscourse,
        Category::ComplexDiscourse,
        Category::HighlyComplex,
        Category::None,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::SimpleRepetition => "simple-repetition",
            Category::ComplexRepetition => "complex-repetition",
            Category::ContractionEn => "contraction-en",
            Category::ContractionEs => "contraction-es",
            Category::SimpleEllipsis => "simple-ellipsis",
            Category::ComplexEllipsis => "complex-ellipsis",
            Category::SimpleDiscourse => "simple-discourse",
            Category::ComplexDiscourse => "complex-discourse",
            Category::HighlyComplex => "highly-complex",
            Category::None => "none",
        }
    }

    /// Row label used in rendered tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Category::SimpleRepetition => "Repetition",
            Category::ComplexRepetition => "Repetition+",
            Category::ContractionEn => "Contr. (EN)",
            Category::ContractionEs => "Contr. (ES)",
            Category::SimpleEllipsis => "Ellipsis",
            Category::ComplexEllipsis => "Ellipsis+",
            Category::SimpleDiscourse => "Discourse",
            Category::ComplexDiscourse => "Discourse+",
            Category::HighlyComplex => "Complex",
            Category::None => "None",
        }
    }

    /// Number of sentences per category in the full benchmark.
    pub fn benchmark_count(self) -> usize {
        match self {
            Category::SimpleRepetition => 10,
            Category::ComplexRepetition => 15,
            Category::ContractionEn => 10,
            Category::ContractionEs => 10,
            Category::SimpleEllipsis => 10,
            Category::ComplexEllipsis => 15,
            Category::SimpleDiscourse => 10,
            Category::ComplexDiscourse => 15,
            Category::HighlyComplex => 12,
            Category::None => 20,
        }
    }
}

impl FromStr for Category {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Category::ALL
            .into_iter()
            .find(|c| c.label() == t)
            .ok_or_else(|| TagError::Category(s.to_string()))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Universal v2 relations plus `reparandum`.
pub const UD_RELATIONS: &[&str] = &[
    "acl", "advcl", "advmod", "amod", "appos", "aux", "case", "cc", "ccomp", "clf", "compound",
    "conj", "cop", "csubj", "dep", "det", "discourse", "dislocated", "expl", "fixed", "flat",
    "goeswith", "iobj", "list", "mark", "nmod", "nsubj", "nummod", "obj", "obl", "orphan",
    "parataxis", "punct", "reparandum", "root", "vocative", "xcomp",
];

/// Relations whose dependents are function words; everything else is content.
pub const FUNCTIONAL_RELATIONS: &[&str] = &["aux", "cop", "case", "det", "clf", "mark", "cc", "punct"];

/// Label before the first `:`.
pub fn base_relation(label: &str) -> &str {
    label.split(':').next().unwrap_or(label)
}

/// Maps accepted aliases onto the canonical label (`rep` becomes `reparandum`).
pub fn canonical_deprel(label: &str) -> String {
    let t = label.trim();
    match t.split_once(':') {
        Some(("rep", sub)) => format!("reparandum:{sub}"),
        None if t == "rep" => "reparandum".to_string(),
        _ => t.to_string(),
    }
}

/// True unless the relation's base label is one of the functional relations.
pub fn is_content_relation(deprel: &str) -> bool {
    !FUNCTIONAL_RELATIONS.contains(&base_relation(deprel.trim()))
}

/// Allowed dependency relations. Subtyped labels are accepted when their base is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSet {
    labels: BTreeSet<String>,
}

impl Default for RelationSet {
    fn default() -> Self {
        RelationSet::new(UD_RELATIONS.iter().copied())
    }
}

impl RelationSet {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        RelationSet {
            labels: labels.into_iter().map(|s| canonical_deprel(s.as_ref())).collect(),
        }
    }

    pub fn contains(&self, label: &str) -> bool {
        let label = canonical_deprel(label);
        !label.is_empty() && (self.labels.contains(&label) || self.labels.contains(base_relation(&label)))
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    /// Splits the set into (content, functional) labels.
    pub fn partition(&self) -> (Vec<&str>, Vec<&str>) {
        self.iter().partition(|l| is_content_relation(l))
    }
}
