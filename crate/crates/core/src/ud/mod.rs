//! Spoken-UD data model and structural validators.

mod node_id;
mod sentence;
mod tags;
mod validate;

pub use node_id::{Head, NodeId, NodeIdError};
pub use sentence::{mwe_part_count, MweSpan, Sentence, Token};
pub use tags::{
    base_relation, canonical_deprel, is_content_relation, Category, LangTag, RelationSet, SpokenLabel,
    TagError, Upos, FUNCTIONAL_RELATIONS, UD_RELATIONS,
};
pub use validate::{topological_order, validate_tree, HeadGraph, Issue, IssueCode, Parent, TreeError, ValidationReport};
pub(crate) use validate::join_ids;
