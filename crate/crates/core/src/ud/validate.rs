use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::node_id::{Head, NodeId};
use super::sentence::Sentence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IssueCode {
    NoRoot,
    MultipleRoots,
    Cycle,
    DanglingHead,
    DanglingAnchor,
    IdOrder,
    MweComponentAnnotated,
    /// UPOS, HEAD or DEPREL missing on a row that must be annotated.
    MissingAnnotation,
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    pub node_ids: Vec<NodeId>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    fn from_issues(issues: Vec<Issue>) -> Self {
        ValidationReport {
            ok: issues.is_empty(),
            issues,
        }
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    pub fn of(&self, code: IssueCode) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(move |i| i.code == code)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("cycle among nodes {}", join_ids(.members))]
    CycleFound { members: Vec<NodeId> },
    #[error("node {node} has a head that does not exist")]
    DanglingHead { node: NodeId },
}

pub(crate) fn join_ids(ids: &[NodeId]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Where a node's head link points, resolved against the annotatable nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parent {
    Root,
    Node(usize),
    Missing,
    /// Head names a node that is absent or is an unannotated MWE component.
    Dangling,
}

/// Head links over the annotatable nodes of a sentence.
#[derive(Debug, Clone)]
pub struct HeadGraph {
    pub ids: Vec<NodeId>,
    pub parents: Vec<Parent>,
    index: HashMap<NodeId, usize>,
}

impl HeadGraph {
    pub fn new(sentence: &Sentence) -> Self {
        let comps = sentence.mwe_components();
        let nodes: Vec<_> = sentence.tokens.iter().filter(|t| !comps.contains(&t.id)).collect();
        let ids: Vec<NodeId> = nodes.iter().map(|t| t.id).collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let parents = nodes
            .iter()
            .map(|t| match t.head {
                None => Parent::Missing,
                Some(Head::Root) => Parent::Root,
                Some(Head::Node(h)) => match index.get(&h) {
                    Some(&i) => Parent::Node(i),
                    None => Parent::Dangling,
                },
            })
            .collect();
        HeadGraph { ids, parents, index }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// All head-link cycles, each as sorted member ids, ordered by first member.
    pub fn cycles(&self) -> Vec<Vec<NodeId>> {
        const NEW: u8 = 0;
        const ACTIVE: u8 = 1;
        const DONE: u8 = 2;
        let mut state = vec![NEW; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if state[start] != NEW {
                continue;
            }
            let mut path = Vec::new();
            let mut cur = start;
            loop {
                match state[cur] {
                    DONE => break,
                    ACTIVE => {
                        let at = path.iter().position(|&p| p == cur).expect("active node on path");
                        let mut members: Vec<NodeId> = path[at..].iter().map(|&i| self.ids[i]).collect();
                        members.sort();
                        cycles.push(members);
                        break;
                    }
                    _ => {}
                }
                state[cur] = ACTIVE;
                path.push(cur);
                match self.parents[cur] {
                    Parent::Node(p) => cur = p,
                    _ => break,
                }
            }
            for p in path {
                state[p] = DONE;
            }
        }
        cycles.sort();
        cycles
    }

    /// Whether `node` lies in the subtree rooted at `ancestor` (inclusive).
    pub fn in_subtree(&self, node: NodeId, ancestor: NodeId) -> bool {
        let (Some(mut cur), Some(target)) = (self.index_of(node), self.index_of(ancestor)) else {
            return false;
        };
        for _ in 0..=self.len() {
            if cur == target {
                return true;
            }
            match self.parents[cur] {
                Parent::Node(p) => cur = p,
                _ => return false,
            }
        }
        false
    }

    pub fn dependents_count(&self, node: NodeId) -> usize {
        match self.index_of(node) {
            Some(i) => self.parents.iter().filter(|p| **p == Parent::Node(i)).count(),
            None => 0,
        }
    }
}

/// Reports every structural problem in a sentence without modifying it.
pub fn validate_tree(sentence: &Sentence) -> ValidationReport {
    let mut issues = Vec::new();

    for pair in sentence.tokens.windows(2) {
        if pair[0].id >= pair[1].id {
            issues.push(Issue {
                code: IssueCode::IdOrder,
                node_ids: vec![pair[0].id, pair[1].id],
                message: format!("node {} is not followed by a larger id (found {})", pair[0].id, pair[1].id),
            });
        }
    }

    let comps = sentence.mwe_components();
    for span in sentence.mwe_spans() {
        let annotated: Vec<NodeId> = span
            .components
            .iter()
            .filter(|c| sentence.get(**c).is_some_and(|t| t.has_annotation()))
            .copied()
            .collect();
        if !annotated.is_empty() {
            issues.push(Issue {
                code: IssueCode::MweComponentAnnotated,
                message: format!(
                    "rows {} are components of multiword node {} and must stay unannotated",
                    join_ids(&annotated),
                    span.node
                ),
                node_ids: annotated,
            });
        }
    }

    let present: BTreeSet<NodeId> = sentence.tokens.iter().map(|t| t.id).collect();
    for t in sentence.tokens.iter().filter(|t| !comps.contains(&t.id)) {
        let mut missing = Vec::new();
        if t.upos.is_none() {
            missing.push("UPOS");
        }
        if t.head.is_none() {
            missing.push("HEAD");
        }
        if t.deprel.as_deref().is_none_or(str::is_empty) {
            missing.push("DEPREL");
        }
        if !missing.is_empty() {
            issues.push(Issue {
                code: IssueCode::MissingAnnotation,
                node_ids: vec![t.id],
                message: format!("node {} lacks {}", t.id, missing.join("/")),
            });
        }
        if let Some(Head::Node(h)) = t.head {
            if h != t.id && (!present.contains(&h) || comps.contains(&h)) {
                let why = if present.contains(&h) {
                    "an unannotated multiword component"
                } else {
                    "a node that does not exist"
                };
                issues.push(Issue {
                    code: IssueCode::DanglingHead,
                    node_ids: vec![t.id, h],
                    message: format!("head of node {} is {h}, {why}", t.id),
                });
            }
        }
    }
    for t in &sentence.tokens {
        if let Some(a) = t.spoken_anchor {
            if !present.contains(&a) {
                issues.push(Issue {
                    code: IssueCode::DanglingAnchor,
                    node_ids: vec![t.id, a],
                    message: format!("spoken anchor of node {} is {a}, which does not exist", t.id),
                });
            }
        }
    }

    let graph = HeadGraph::new(sentence);
    for members in graph.cycles() {
        issues.push(Issue {
            code: IssueCode::Cycle,
            message: format!("head links form a cycle over {}", join_ids(&members)),
            node_ids: members,
        });
    }

    let roots = sentence.roots();
    match roots.len() {
        0 if !graph.is_empty() => issues.push(Issue {
            code: IssueCode::NoRoot,
            node_ids: Vec::new(),
            message: "no node is attached to the root".to_string(),
        }),
        0 | 1 => {}
        _ => issues.push(Issue {
            code: IssueCode::MultipleRoots,
            message: format!("{} nodes attach to the root: {}", roots.len(), join_ids(&roots)),
            node_ids: roots,
        }),
    }

    ValidationReport::from_issues(issues)
}

/// Orders annotatable nodes so every head precedes its dependents.
///
/// Nodes without a head start the order alongside root dependents. Fails
/// with the smallest cycle when head links are cyclic.
pub fn topological_order(sentence: &Sentence) -> Result<Vec<NodeId>, TreeError> {
    let graph = HeadGraph::new(sentence);
    if let Some(i) = graph.parents.iter().position(|p| *p == Parent::Dangling) {
        return Err(TreeError::DanglingHead { node: graph.ids[i] });
    }
    let mut cycles = graph.cycles();
    if !cycles.is_empty() {
        cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        return Err(TreeError::CycleFound {
            members: cycles.swap_remove(0),
        });
    }
    let mut children = vec![Vec::new(); graph.len()];
    let mut queue = VecDeque::new();
    for (i, p) in graph.parents.iter().enumerate() {
        match p {
            Parent::Node(h) => children[*h].push(i),
            _ => queue.push_back(i),
        }
    }
    let mut order = Vec::with_capacity(graph.len());
    while let Some(i) = queue.pop_front() {
        order.push(graph.ids[i]);
        queue.extend(children[i].iter().copied());
    }
    Ok(order)
}
