use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::align::{Alignment, LinkKind};
use super::config::ToleranceConfig;
use super::score::round_half_up;
use crate::metrics::head_matches;
use crate::ud::{Head, NodeId, Sentence};

/// The five component scores, each an integer in 1..=100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentScores {
    pub s_split: u32,
    pub s_id: u32,
    pub s_upos: u32,
    pub s_head: u32,
    pub s_deprel: u32,
}

impl ComponentScores {
    pub fn perfect() -> Self {
        ComponentScores {
            s_split: 100,
            s_id: 100,
            s_upos: 100,
            s_head: 100,
            s_deprel: 100,
        }
    }

    pub fn as_array(&self) -> [u32; 5] {
        [self.s_split, self.s_id, self.s_upos, self.s_head, self.s_deprel]
    }
}

/// `100 * num / den`, rounded half-up and clamped to 1..=100. An empty
/// denominator means nothing could go wrong and scores 100.
fn percent(num: f64, den: f64) -> u32 {
    if den <= 0.0 {
        return 100;
    }
    round_half_up(100.0 * num / den).clamp(1, 100) as u32
}

/// Gold head of the gold head, when there is one.
fn grandparent(gold: &Sentence, head: Option<Head>) -> Option<Head> {
    match head {
        Some(Head::Node(h)) => gold.get(h).and_then(|t| t.head),
        _ => None,
    }
}

pub fn component_scores(
    gold: &Sentence,
    system: &Sentence,
    alignment: &Alignment,
    tolerance: &ToleranceConfig,
) -> ComponentScores {
    let (g2s, s2g) = alignment.one_one_maps();
    let one_one = alignment.count(LinkKind::OneOne) as f64;

    let s_split = percent(2.0 * one_one, (gold.len() + system.len()) as f64);

    let g_rank: HashMap<NodeId, usize> = gold.index();
    let s_rank: HashMap<NodeId, usize> = system.index();
    let same_rank = g2s.iter().filter(|(g, s)| g_rank.get(g) == s_rank.get(s)).count();
    let s_id = percent(same_rank as f64, gold.len() as f64);

    let annotatable = gold.annotatable();
    let (mut upos, mut head, mut deprel) = (0.0, 0.0, 0.0);
    for g in &annotatable {
        let Some(s) = g2s.get(&g.id).and_then(|sid| system.get(*sid)) else {
            continue;
        };
        upos += tolerance.upos_credit(g.upos, s.upos);
        deprel += tolerance.deprel_credit(g.deprel.as_deref(), s.deprel.as_deref());
        if head_matches(g.head, s.head, &s2g) {
            head += 1.0;
        } else if head_matches(grandparent(gold, g.head), s.head, &s2g) {
            head += 0.5;
        }
    }
    let n = annotatable.len() as f64;
    ComponentScores {
        s_split,
        s_id,
        s_upos: percent(upos, n),
        s_head: percent(head, n),
        s_deprel: percent(deprel, n),
    }
}
