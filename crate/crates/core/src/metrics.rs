//! Attachment scores (LAS, UAS, CLAS) and UPOS accuracy over an alignment.

use std::collections::{BTreeMap, HashSet};
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flexud::Alignment;
use crate::table::{self, TableRow, OVERALL};
use crate::ud::{is_content_relation, Category, Head, NodeId, Sentence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("alignment references {side} node {id} that the sentence lacks")]
    AlignmentMismatch { side: &'static str, id: NodeId },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub gold_total: usize,
    pub aligned: usize,
    pub head_correct: usize,
    pub labeled_correct: usize,
    pub content_gold: usize,
    pub content_labeled_correct: usize,
    pub upos_correct: usize,
    /// System annotatable tokens without a one-one gold partner.
    pub system_extra: usize,
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            gold_total: self.gold_total + o.gold_total,
            aligned: self.aligned + o.aligned,
            head_correct: self.head_correct + o.head_correct,
            labeled_correct: self.labeled_correct + o.labeled_correct,
            content_gold: self.content_gold + o.content_gold,
            content_labeled_correct: self.content_labeled_correct + o.content_labeled_correct,
            upos_correct: self.upos_correct + o.upos_correct,
            system_extra: self.system_extra + o.system_extra,
        }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardScores {
    pub las: f64,
    pub uas: f64,
    pub clas: f64,
    pub upos_acc: f64,
    pub counts: Counts,
    /// Set when there are no gold tokens, so LAS/UAS/UPOS are reported as 0.
    pub empty_gold: bool,
    /// Set when no gold token carries a content relation, so CLAS is reported as 0.
    pub empty_content: bool,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl StandardScores {
    pub fn from_counts(counts: Counts) -> Self {
        StandardScores {
            las: ratio(counts.labeled_correct, counts.gold_total),
            uas: ratio(counts.head_correct, counts.gold_total),
            clas: ratio(counts.content_labeled_correct, counts.content_gold),
            upos_acc: ratio(counts.upos_correct, counts.gold_total),
            counts,
            empty_gold: counts.gold_total == 0,
            empty_content: counts.content_gold == 0,
        }
    }
}

/// Whether a system head, seen through the one-one map, names the gold head.
pub(crate) fn head_matches(gold: Option<Head>, system: Option<Head>, s2g: &std::collections::HashMap<NodeId, NodeId>) -> bool {
    match (gold, system) {
        (Some(Head::Root), Some(Head::Root)) => true,
        (Some(Head::Node(g)), Some(Head::Node(s))) => s2g.get(&s) == Some(&g),
        _ => false,
    }
}

fn check_known(alignment: &Alignment, gold: &Sentence, system: &Sentence) -> Result<(), MetricsError> {
    let g: HashSet<NodeId> = gold.tokens.iter().map(|t| t.id).collect();
    let s: HashSet<NodeId> = system.tokens.iter().map(|t| t.id).collect();
    for link in &alignment.links {
        if let Some(id) = link.gold_ids.iter().find(|id| !g.contains(id)) {
            return Err(MetricsError::AlignmentMismatch { side: "gold", id: *id });
        }
        if let Some(id) = link.system_ids.iter().find(|id| !s.contains(id)) {
            return Err(MetricsError::AlignmentMismatch { side: "system", id: *id });
        }
    }
    Ok(())
}

pub fn attachment_scores(
    gold: &Sentence,
    system: &Sentence,
    alignment: &Alignment,
) -> Result<StandardScores, MetricsError> {
    check_known(alignment, gold, system)?;
    let (g2s, s2g) = alignment.one_one_maps();
    let mut c = Counts::default();
    for g in gold.annotatable() {
        c.gold_total += 1;
        let content = is_content_relation(g.deprel.as_deref().unwrap_or(""));
        if content {
            c.content_gold += 1;
        }
        let Some(s) = g2s.get(&g.id).and_then(|sid| system.get(*sid)) else {
            continue;
        };
        c.aligned += 1;
        if g.upos == s.upos {
            c.upos_correct += 1;
        }
        if head_matches(g.head, s.head, &s2g) {
            c.head_correct += 1;
            if g.deprel == s.deprel {
                c.labeled_correct += 1;
                if content {
                    c.content_labeled_correct += 1;
                }
            }
        }
    }
    c.system_extra = system.annotatable().iter().filter(|t| !s2g.contains_key(&t.id)).count();
    Ok(StandardScores::from_counts(c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceScores {
    pub sentence_id: String,
    pub category: Category,
    pub scores: StandardScores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub label: String,
    pub category: Option<Category>,
    pub sentences: usize,
    /// Absent for a category with no sentences.
    pub scores: Option<StandardScores>,
}

/// Micro-averaged scores per category plus an overall row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryTable {
    pub rows: Vec<CategoryRow>,
}

pub const STANDARD_COLUMNS: [&str; 4] = ["LAS", "UAS", "CLAS", "U-LAS"];

pub fn aggregate_by_category(results: &[SentenceScores]) -> CategoryTable {
    let mut per: BTreeMap<Category, (usize, Counts)> = BTreeMap::new();
    let mut overall = (0, Counts::default());
    for r in results {
        let e = per.entry(r.category).or_default();
        e.0 += 1;
        e.1 += r.scores.counts;
        overall.0 += 1;
        overall.1 += r.scores.counts;
    }
    let mut rows: Vec<CategoryRow> = Category::ALL
        .iter()
        .map(|c| {
            let (n, counts) = per.get(c).copied().unwrap_or_default();
            CategoryRow {
                label: c.display_name().to_string(),
                category: Some(*c),
                sentences: n,
                scores: (n > 0).then(|| StandardScores::from_counts(counts)),
            }
        })
        .collect();
    rows.push(CategoryRow {
        label: OVERALL.to_string(),
        category: None,
        sentences: overall.0,
        scores: (overall.0 > 0).then(|| StandardScores::from_counts(overall.1)),
    });
    CategoryTable { rows }
}

impl CategoryTable {
    fn table_rows(&self) -> Vec<TableRow> {
        self.rows
            .iter()
            .map(|r| TableRow {
                label: r.label.clone(),
                values: match &r.scores {
                    Some(s) => vec![Some(s.las), Some(s.uas), Some(s.clas), Some(s.upos_acc)],
                    None => vec![None; 4],
                },
            })
            .collect()
    }

    pub fn to_markdown(&self) -> String {
        table::markdown(&STANDARD_COLUMNS, &self.table_rows(), 2)
    }

    pub fn to_csv(&self) -> String {
        table::csv(&STANDARD_COLUMNS, &self.table_rows(), 4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexud::align_tokens;
    use crate::ud::{Token, Upos};

    fn n(i: u32) -> Head {
        Head::Node(NodeId::int(i))
    }

    fn four(heads: [Head; 4], rels: [&str; 4]) -> Sentence {
        let forms = ["the", "dog", "saw", "cats"];
        let upos = [Upos::Det, Upos::Noun, Upos::Verb, Upos::Noun];
        Sentence::new(
            "f",
            (0..4)
                .map(|i| Token::annotated(NodeId::int(i as u32 + 1), forms[i], upos[i], heads[i], rels[i]))
                .collect(),
        )
    }

    fn gold() -> Sentence {
        four([n(2), n(3), Head::Root, n(3)], ["det", "nsubj", "root", "obj"])
    }

    fn score(g: &Sentence, s: &Sentence) -> StandardScores {
        attachment_scores(g, s, &align_tokens(g, s)).unwrap()
    }

    #[test]
    fn identity_scores_one() {
        let s = score(&gold(), &gold());
        assert_eq!((s.las, s.uas, s.clas, s.upos_acc), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn half_heads_quarter_labels() {
        // Heads right on tokens 1 and 3; label right only on 3.
        let sys = four([n(2), n(1), Head::Root, n(1)], ["amod", "obj", "root", "nsubj"]);
        let s = score(&gold(), &sys);
        assert_eq!(s.counts.head_correct, 2);
        assert_eq!(s.counts.labeled_correct, 1);
        assert_eq!((s.uas, s.las), (0.5, 0.25));
    }

    #[test]
    fn clas_ignores_wrong_determiner_head() {
        let sys = four([n(4), n(3), Head::Root, n(3)], ["det", "nsubj", "root", "obj"]);
        let s = score(&gold(), &sys);
        assert_eq!(s.las, 0.75);
        assert_eq!(s.clas, 1.0);
        assert_eq!(s.counts.content_gold, 3);
    }

    #[test]
    fn unknown_id_is_a_mismatch() {
        let mut al = align_tokens(&gold(), &gold());
        al.links[0].system_ids = vec![NodeId::int(9)];
        assert!(matches!(
            attachment_scores(&gold(), &gold(), &al),
            Err(MetricsError::AlignmentMismatch { side: "system", .. })
        ));
    }

    #[test]
    fn category_uas_is_micro_averaged() {
        let mk = |heads: usize| SentenceScores {
            sentence_id: format!("s{heads}"),
            category: Category::SimpleDiscourse,
            scores: StandardScores::from_counts(Counts {
                gold_total: 4,
                head_correct: heads,
                ..Counts::default()
            }),
        };
        let t = aggregate_by_category(&[mk(2), mk(4)]);
        let row = t.rows.iter().find(|r| r.category == Some(Category::SimpleDiscourse)).unwrap();
        assert_eq!(row.scores.unwrap().uas, 0.75);
        assert_eq!(t.rows.len(), 11);
        assert_eq!(t.rows[10].label, "Overall");
        assert!(t.rows[0].scores.is_none());
    }

    #[test]
    fn markdown_header() {
        let md = aggregate_by_category(&[]).to_markdown();
        assert!(md.starts_with("| Category | LAS | UAS | CLAS | U-LAS |\n"));
    }
}
