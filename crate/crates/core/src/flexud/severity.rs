use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::align::Alignment;
use super::config::{PenaltySchedule, ToleranceConfig};
use crate::ud::{base_relation, Head, HeadGraph, NodeId, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IssueClass {
    MissingDottedMwe,
    ReparandumMisattached,
    InvalidHeadPersisting,
    MultipleRootsOrCycle,
    TolerantUposSubstitution,
    NearMissDeprel,
    MinorMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Catastrophic,
    Minor,
}

impl IssueClass {
    pub fn severity(self) -> Severity {
        match self {
            IssueClass::MissingDottedMwe
            | IssueClass::ReparandumMisattached
            | IssueClass::InvalidHeadPersisting
            | IssueClass::MultipleRootsOrCycle => Severity::Catastrophic,
            _ => Severity::Minor,
        }
    }

    pub fn contribution(self, schedule: &PenaltySchedule) -> f64 {
        match self {
            IssueClass::MissingDottedMwe => schedule.missing_dotted_mwe,
            IssueClass::ReparandumMisattached => schedule.reparandum_misattached,
            IssueClass::InvalidHeadPersisting => schedule.invalid_head_persisting,
            IssueClass::MultipleRootsOrCycle => schedule.multiple_roots_or_cycle,
            IssueClass::TolerantUposSubstitution => schedule.tolerant_upos_substitution,
            IssueClass::NearMissDeprel => schedule.near_miss_deprel,
            IssueClass::MinorMismatch => schedule.minor_mismatch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityIssue {
    pub class: IssueClass,
    pub severity: Severity,
    pub contribution: f64,
    pub node_ids: Vec<NodeId>,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeverityReport {
    pub issues: Vec<SeverityIssue>,
    #[serde(rename = "P")]
    pub p: f64,
}

impl SeverityReport {
    pub fn from_issues(issues: Vec<SeverityIssue>, cap: f64) -> Self {
        let sum: f64 = issues.iter().map(|i| i.contribution).sum();
        SeverityReport { issues, p: sum.min(cap) }
    }

    pub fn count(&self, class: IssueClass) -> usize {
        self.issues.iter().filter(|i| i.class == class).count()
    }
}

struct Collector<'a> {
    schedule: &'a PenaltySchedule,
    issues: Vec<SeverityIssue>,
}

impl Collector<'_> {
    fn flag(&mut self, class: IssueClass, node_ids: Vec<NodeId>, note: String) {
        self.issues.push(SeverityIssue {
            class,
            severity: class.severity(),
            contribution: class.contribution(self.schedule),
            node_ids,
            note,
        });
    }
}

pub fn detect_severity(
    gold: &Sentence,
    system: &Sentence,
    alignment: &Alignment,
    tolerance: &ToleranceConfig,
    schedule: &PenaltySchedule,
) -> SeverityReport {
    let mut c = Collector {
        schedule,
        issues: Vec::new(),
    };
    let (g2s, s2g) = alignment.one_one_maps();

    // Gold dotted multiword nodes the system spans without a dotted node.
    let gold_mwes: HashSet<NodeId> = gold.mwe_spans().into_iter().map(|s| s.node).collect();
    for link in &alignment.links {
        for g in link.gold_ids.iter().filter(|g| gold_mwes.contains(g)) {
            let system_has_dotted = link.system_ids.iter().any(|s| s.is_dotted());
            if !system_has_dotted && !link.system_ids.is_empty() {
                let form = gold.get(*g).map(|t| t.form.as_str()).unwrap_or("");
                c.flag(
                    IssueClass::MissingDottedMwe,
                    vec![*g],
                    format!("gold multiword node {g} ({form}) has no system counterpart"),
                );
            }
        }
    }

    // Reparandum tokens attached outside the subtree of their gold head.
    let gold_graph = HeadGraph::new(gold);
    for g in gold.annotatable() {
        if g.deprel.as_deref().map(base_relation) != Some("reparandum") {
            continue;
        }
        let (Some(Head::Node(gold_head)), Some(s)) = (g.head, g2s.get(&g.id).and_then(|s| system.get(*s))) else {
            continue;
        };
        let inside = match s.head {
            Some(Head::Node(sh)) => s2g.get(&sh).is_some_and(|mapped| gold_graph.in_subtree(*mapped, gold_head)),
            _ => false,
        };
        if !inside {
            c.flag(
                IssueClass::ReparandumMisattached,
                vec![g.id],
                format!("reparandum {} attached outside the subtree of {gold_head}", g.id),
            );
        }
    }

    // System structure: heads naming missing nodes, extra roots, cycles.
    let sys_graph = HeadGraph::new(system);
    for t in system.annotatable() {
        if let Some(Head::Node(h)) = t.head {
            if sys_graph.index_of(h).is_none() {
                c.flag(
                    IssueClass::InvalidHeadPersisting,
                    vec![t.id],
                    format!("head {h} of {} does not exist", t.id),
                );
            }
        }
    }
    let roots = system.roots();
    if roots.len() > 1 {
        c.flag(
            IssueClass::MultipleRootsOrCycle,
            roots.clone(),
            format!("{} root nodes", roots.len()),
        );
    }
    for cycle in sys_graph.cycles() {
        let members: Vec<String> = cycle.iter().map(|id| id.to_string()).collect();
        c.flag(
            IssueClass::MultipleRootsOrCycle,
            cycle,
            format!("head cycle through {}", members.join(", ")),
        );
    }

    // Label-level mismatches on aligned tokens.
    for g in gold.annotatable() {
        let Some(s) = g2s.get(&g.id).and_then(|s| system.get(*s)) else {
            continue;
        };
        let upos = tolerance.upos_credit(g.upos, s.upos);
        if upos < 1.0 {
            let show = |u: Option<crate::ud::Upos>| u.map(|u| u.as_str()).unwrap_or("_");
            let note = format!("UPOS {} for gold {} on {}", show(s.upos), show(g.upos), g.id);
            let class = if upos > 0.0 {
                IssueClass::TolerantUposSubstitution
            } else {
                IssueClass::MinorMismatch
            };
            c.flag(class, vec![g.id], note);
        }
        let deprel = tolerance.deprel_credit(g.deprel.as_deref(), s.deprel.as_deref());
        if deprel < 1.0 {
            let show = |d: &Option<String>| d.clone().unwrap_or_else(|| "_".into());
            let note = format!("DEPREL {} for gold {} on {}", show(&s.deprel), show(&g.deprel), g.id);
            let class = if deprel > 0.0 {
                IssueClass::NearMissDeprel
            } else {
                IssueClass::MinorMismatch
            };
            c.flag(class, vec![g.id], note);
        }
    }

    SeverityReport::from_issues(c.issues, schedule.cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexud::align_tokens;
    use crate::ud::{Token, Upos};

    fn n(i: u32) -> Head {
        Head::Node(NodeId::int(i))
    }

    fn pitta_gold() -> Sentence {
        let mut dotted = Token::annotated(NodeId::dotted(3, 1), "pitta_bread", Upos::Noun, n(2), "obj");
        dotted.lemma = Some("pitta_bread".into());
        Sentence::new(
            "p",
            vec![
                Token::annotated(NodeId::int(1), "I", Upos::Pron, n(2), "nsubj"),
                Token::annotated(NodeId::int(2), "want", Upos::Verb, Head::Root, "root"),
                Token::new(NodeId::int(3), "pitta"),
                dotted,
                Token::new(NodeId::int(4), "bread"),
            ],
        )
    }

    fn detect(g: &Sentence, s: &Sentence) -> SeverityReport {
        detect_severity(
            g,
            s,
            &align_tokens(g, s),
            &ToleranceConfig::default(),
            &PenaltySchedule::default(),
        )
    }

    #[test]
    fn perfect_parse_has_no_issues() {
        let r = detect(&pitta_gold(), &pitta_gold());
        assert!(r.issues.is_empty());
        assert_eq!(r.p, 0.0);
    }

    #[test]
    fn missing_mwe_plus_invalid_head() {
        let g = pitta_gold();
        let s = Sentence::new(
            "p",
            vec![
                Token::annotated(NodeId::int(1), "I", Upos::Pron, n(9), "nsubj"),
                Token::annotated(NodeId::int(2), "want", Upos::Verb, Head::Root, "root"),
                Token::annotated(NodeId::int(3), "pitta", Upos::Noun, n(2), "obj"),
                Token::annotated(NodeId::int(4), "bread", Upos::Noun, n(3), "compound"),
            ],
        );
        let r = detect(&g, &s);
        assert_eq!(r.count(IssueClass::MissingDottedMwe), 1);
        assert_eq!(r.count(IssueClass::InvalidHeadPersisting), 1);
        assert!((r.p - 0.70).abs() < 1e-12);
    }

    #[test]
    fn twelve_minor_mismatches() {
        let mk = |upos: Upos| {
            Sentence::new(
                "m",
                (1..=12)
                    .map(|i| {
                        let head = if i == 1 { Head::Root } else { n(1) };
                        let rel = if i == 1 { "root" } else { "dep" };
                        Token::annotated(NodeId::int(i), &format!("t{i}"), upos, head, rel)
                    })
                    .collect(),
            )
        };
        let r = detect(&mk(Upos::Adj), &mk(Upos::Adv));
        assert_eq!(r.count(IssueClass::MinorMismatch), 12);
        assert!((r.p - 0.24).abs() < 1e-12);
    }

    #[test]
    fn reparandum_outside_gold_subtree() {
        // "I I want": first I is a reparandum of the second.
        let g = Sentence::new(
            "r",
            vec![
                Token::annotated(NodeId::int(1), "I", Upos::Pron, n(2), "reparandum"),
                Token::annotated(NodeId::int(2), "I", Upos::Pron, n(3), "nsubj"),
                Token::annotated(NodeId::int(3), "want", Upos::Verb, Head::Root, "root"),
                Token::annotated(NodeId::int(4), "it", Upos::Pron, n(3), "obj"),
            ],
        );
        let mut s = g.clone();
        s.tokens[0].head = Some(n(4));
        let r = detect(&g, &s);
        assert_eq!(r.count(IssueClass::ReparandumMisattached), 1);
    }

    #[test]
    fn cycles_and_extra_roots() {
        let s = Sentence::new(
            "c",
            vec![
                Token::annotated(NodeId::int(1), "a", Upos::X, n(2), "dep"),
                Token::annotated(NodeId::int(2), "b", Upos::X, n(1), "dep"),
                Token::annotated(NodeId::int(3), "c", Upos::X, Head::Root, "root"),
                Token::annotated(NodeId::int(4), "d", Upos::X, Head::Root, "root"),
            ],
        );
        let r = detect(&s, &s);
        assert_eq!(r.count(IssueClass::MultipleRootsOrCycle), 2);
        assert_eq!(r.p, 0.95);
    }
}
