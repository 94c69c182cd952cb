//! Gold/system token alignment tolerant of splits, merges and dotted MWEs.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ud::{NodeId, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    OneOne,
    /// One system token covers several gold tokens.
    GoldSplit,
    /// One gold token covers several system tokens.
    SystemSplit,
    /// A dotted multiword node on one side against a plain span on the other.
    Mwe,
    UnalignedGold,
    UnalignedSystem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub gold_ids: Vec<NodeId>,
    pub system_ids: Vec<NodeId>,
    pub kind: LinkKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignmentError {
    #[error("alignment references {side} node {id} that the sentence lacks")]
    UnknownNode { side: &'static str, id: NodeId },
    #[error("{side} node {id} appears in {count} links")]
    NotCovered { side: &'static str, id: NodeId, count: usize },
}

impl Alignment {
    /// Gold-to-system and system-to-gold maps over one-one links.
    pub fn one_one_maps(&self) -> (HashMap<NodeId, NodeId>, HashMap<NodeId, NodeId>) {
        let mut g2s = HashMap::new();
        let mut s2g = HashMap::new();
        for l in self.links.iter().filter(|l| l.kind == LinkKind::OneOne) {
            g2s.insert(l.gold_ids[0], l.system_ids[0]);
            s2g.insert(l.system_ids[0], l.gold_ids[0]);
        }
        (g2s, s2g)
    }

    pub fn count(&self, kind: LinkKind) -> usize {
        self.links.iter().filter(|l| l.kind == kind).count()
    }

    /// Checks that every node of both sentences appears in exactly one link.
    pub fn check(&self, gold: &Sentence, system: &Sentence) -> Result<(), AlignmentError> {
        check_side("gold", gold, self.links.iter().flat_map(|l| &l.gold_ids))?;
        check_side("system", system, self.links.iter().flat_map(|l| &l.system_ids))
    }
}

fn check_side<'a>(
    side: &'static str,
    sentence: &Sentence,
    ids: impl Iterator<Item = &'a NodeId>,
) -> Result<(), AlignmentError> {
    let mut counts: HashMap<NodeId, usize> = sentence.tokens.iter().map(|t| (t.id, 0)).collect();
    for id in ids {
        match counts.get_mut(id) {
            Some(c) => *c += 1,
            None => return Err(AlignmentError::UnknownNode { side, id: *id }),
        }
    }
    for t in &sentence.tokens {
        let count = counts[&t.id];
        if count != 1 {
            return Err(AlignmentError::NotCovered { side, id: t.id, count });
        }
    }
    Ok(())
}

/// Lowercased form without apostrophes or underscores.
pub fn normalize_form(form: &str) -> String {
    form.chars()
        .filter(|c| !matches!(c, '\'' | '\u{2019}' | '`' | '_'))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Longest run one token may cover on the other side.
const MAX_RUN: usize = 6;

const COST_SPLIT_EXACT: u32 = 1;
const COST_SPLIT_NEAR: u32 = 2;
const COST_SUBSTITUTE: u32 = 2;
const COST_UNALIGNED: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Match,
    GoldRun(usize),
    SystemRun(usize),
    Substitute,
    SkipGold,
    SkipSystem,
}

/// Cost of letting `whole` stand for the run `parts`, if allowed at all.
///
/// Exact concatenation is preferred. Contractions whose expansion is not a
/// literal concatenation (`don't` against `do` + `not`, `del` against
/// `de` + `el`) are accepted when the first part is a prefix of the whole
/// and the concatenation is within a small edit distance of it.
fn run_cost(parts: &[&str], whole: &str) -> Option<u32> {
    let concat: String = parts.concat();
    if concat == whole {
        return Some(COST_SPLIT_EXACT);
    }
    let whole_len = whole.chars().count();
    if whole_len < 2 || parts[0].is_empty() || !whole.starts_with(parts[0]) {
        return None;
    }
    let dist = levenshtein(&concat, whole);
    (dist <= 2 && dist <= whole_len / 2).then_some(COST_SPLIT_NEAR)
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Aligns the integer rows of both sides by dynamic programming over
/// normalized forms, then attaches dotted nodes.
pub fn align_tokens(gold: &Sentence, system: &Sentence) -> Alignment {
    let g_ints: Vec<NodeId> = gold.tokens.iter().filter(|t| t.id.is_integer()).map(|t| t.id).collect();
    let s_ints: Vec<NodeId> = system.tokens.iter().filter(|t| t.id.is_integer()).map(|t| t.id).collect();
    let g_norm: Vec<String> = gold.tokens.iter().filter(|t| t.id.is_integer()).map(|t| normalize_form(&t.form)).collect();
    let s_norm: Vec<String> = system.tokens.iter().filter(|t| t.id.is_integer()).map(|t| normalize_form(&t.form)).collect();

    let steps = integer_steps(&g_norm, &s_norm);
    let mut links = Vec::new();
    let (mut i, mut j) = (0, 0);
    for step in steps {
        let (gi, sj, kind) = match step {
            Step::Match | Step::Substitute => (1, 1, LinkKind::OneOne),
            Step::GoldRun(k) => (k, 1, LinkKind::GoldSplit),
            Step::SystemRun(k) => (1, k, LinkKind::SystemSplit),
            Step::SkipGold => (1, 0, LinkKind::UnalignedGold),
            Step::SkipSystem => (0, 1, LinkKind::UnalignedSystem),
        };
        links.push(Link {
            gold_ids: g_ints[i..i + gi].to_vec(),
            system_ids: s_ints[j..j + sj].to_vec(),
            kind,
        });
        i += gi;
        j += sj;
    }
    attach_dotted(gold, system, links)
}

fn integer_steps(g: &[String], s: &[String]) -> Vec<Step> {
    let (n, m) = (g.len(), s.len());
    let inf = u32::MAX / 4;
    // best[i][j]: minimal cost of aligning g[i..] with s[j..].
    let mut best = vec![vec![inf; m + 1]; n + 1];
    best[n][m] = 0;
    let moves = |i: usize, j: usize| -> Vec<(Step, u32, usize, usize)> {
        let mut out = Vec::new();
        if i < n && j < m && g[i] == s[j] {
            out.push((Step::Match, 0, i + 1, j + 1));
        }
        if j < m {
            for k in 2..=MAX_RUN.min(n - i) {
                let parts: Vec<&str> = g[i..i + k].iter().map(String::as_str).collect();
                if let Some(c) = run_cost(&parts, &s[j]) {
                    out.push((Step::GoldRun(k), c, i + k, j + 1));
                }
            }
        }
        if i < n {
            for k in 2..=MAX_RUN.min(m - j) {
                let parts: Vec<&str> = s[j..j + k].iter().map(String::as_str).collect();
                if let Some(c) = run_cost(&parts, &g[i]) {
                    out.push((Step::SystemRun(k), c, i + 1, j + k));
                }
            }
        }
        if i < n && j < m && g[i] != s[j] {
            out.push((Step::Substitute, COST_SUBSTITUTE, i + 1, j + 1));
        }
        if i < n {
            out.push((Step::SkipGold, COST_UNALIGNED, i + 1, j));
        }
        if j < m {
            out.push((Step::SkipSystem, COST_UNALIGNED, i, j + 1));
        }
        out
    };
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            best[i][j] = moves(i, j)
                .into_iter()
                .map(|(_, c, ni, nj)| c + best[ni][nj])
                .min()
                .unwrap_or(inf);
        }
    }
    // Walk forward taking the first optimal move in preference order, so
    // ties resolve towards earlier and shorter matches.
    let mut steps = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let (step, _, ni, nj) = moves(i, j)
            .into_iter()
            .find(|(_, c, ni, nj)| c + best[*ni][*nj] == best[i][j])
            .expect("an optimal move exists");
        steps.push(step);
        i = ni;
        j = nj;
    }
    steps
}

struct Dotted {
    id: NodeId,
    norm: String,
    components: Vec<NodeId>,
}

fn dotted_nodes(sentence: &Sentence) -> Vec<Dotted> {
    let spans: HashMap<NodeId, Vec<NodeId>> = sentence
        .mwe_spans()
        .into_iter()
        .map(|s| (s.node, s.components))
        .collect();
    sentence
        .tokens
        .iter()
        .filter(|t| t.id.is_dotted())
        .map(|t| Dotted {
            id: t.id,
            norm: normalize_form(&t.form),
            components: spans.get(&t.id).cloned().unwrap_or_default(),
        })
        .collect()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

fn attach_dotted(gold: &Sentence, system: &Sentence, links: Vec<Link>) -> Alignment {
    let g_dotted = dotted_nodes(gold);
    let s_dotted = dotted_nodes(system);
    if g_dotted.is_empty() && s_dotted.is_empty() {
        return Alignment { links };
    }

    let mut g_link: HashMap<NodeId, usize> = HashMap::new();
    let mut s_link: HashMap<NodeId, usize> = HashMap::new();
    for (k, l) in links.iter().enumerate() {
        g_link.extend(l.gold_ids.iter().map(|id| (*id, k)));
        s_link.extend(l.system_ids.iter().map(|id| (*id, k)));
    }
    let links_touching = |comps: &[NodeId], side: &HashMap<NodeId, usize>| -> BTreeSet<usize> {
        comps.iter().filter_map(|c| side.get(c).copied()).collect()
    };
    let system_side = |ks: &BTreeSet<usize>| -> BTreeSet<NodeId> {
        ks.iter().flat_map(|k| links[*k].system_ids.iter().copied()).collect()
    };

    // Pair gold dotted nodes with system dotted nodes over the same span.
    let mut s_used = vec![false; s_dotted.len()];
    let mut g_partner: Vec<Option<usize>> = vec![None; g_dotted.len()];
    for (gi, gd) in g_dotted.iter().enumerate() {
        let expected: BTreeSet<NodeId> = system_side(&links_touching(&gd.components, &g_link));
        let found = s_dotted.iter().enumerate().find(|(si, sd)| {
            !s_used[*si]
                && sd.norm == gd.norm
                && sd.components.iter().copied().collect::<BTreeSet<_>>() == expected
        });
        if let Some((si, _)) = found {
            s_used[si] = true;
            g_partner[gi] = Some(si);
        }
    }

    let mut parent: Vec<usize> = (0..links.len()).collect();
    let mut is_mwe = vec![false; links.len()];
    let mut extra_gold: HashMap<usize, Vec<NodeId>> = HashMap::new();
    let mut extra_system: HashMap<usize, Vec<NodeId>> = HashMap::new();
    let mut loose: Vec<Link> = Vec::new();
    let mut pairs: Vec<(usize, Link)> = Vec::new();

    for (gi, gd) in g_dotted.iter().enumerate() {
        let touching = links_touching(&gd.components, &g_link);
        if let Some(si) = g_partner[gi] {
            let after = touching.iter().next().copied().unwrap_or(links.len());
            pairs.push((
                after,
                Link {
                    gold_ids: vec![gd.id],
                    system_ids: vec![s_dotted[si].id],
                    kind: LinkKind::OneOne,
                },
            ));
            continue;
        }
        match touching.iter().next().copied() {
            Some(first) => {
                for k in &touching {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, *k));
                    parent[b] = a;
                }
                let r = find(&mut parent, first);
                is_mwe[r] = true;
                extra_gold.entry(first).or_default().push(gd.id);
            }
            None => loose.push(Link {
                gold_ids: vec![gd.id],
                system_ids: Vec::new(),
                kind: LinkKind::UnalignedGold,
            }),
        }
    }
    for (si, sd) in s_dotted.iter().enumerate() {
        if s_used[si] {
            continue;
        }
        let touching = links_touching(&sd.components, &s_link);
        match touching.iter().next().copied() {
            Some(first) => {
                for k in &touching {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, *k));
                    parent[b] = a;
                }
                let r = find(&mut parent, first);
                is_mwe[r] = true;
                extra_system.entry(first).or_default().push(sd.id);
            }
            None => {
                // A lone system dotted node may still match a lone gold one by form.
                let partner = loose.iter().position(|l| {
                    l.kind == LinkKind::UnalignedGold
                        && g_dotted.iter().any(|g| g.id == l.gold_ids[0] && g.norm == sd.norm)
                });
                match partner {
                    Some(p) => {
                        loose[p].system_ids.push(sd.id);
                        loose[p].kind = LinkKind::OneOne;
                    }
                    None => loose.push(Link {
                        gold_ids: Vec::new(),
                        system_ids: vec![sd.id],
                        kind: LinkKind::UnalignedSystem,
                    }),
                }
            }
        }
    }

    // Rebuild: merged groups sit at the position of their first member link.
    let mut groups: Vec<(usize, Link)> = Vec::new();
    let mut group_at: HashMap<usize, usize> = HashMap::new();
    for k in 0..links.len() {
        let r = find(&mut parent, k);
        let slot = *group_at.entry(r).or_insert_with(|| {
            groups.push((
                k,
                Link {
                    gold_ids: Vec::new(),
                    system_ids: Vec::new(),
                    kind: if is_mwe[r] { LinkKind::Mwe } else { links[k].kind },
                },
            ));
            groups.len() - 1
        });
        let g = &mut groups[slot].1;
        g.gold_ids.extend(links[k].gold_ids.iter().copied());
        g.system_ids.extend(links[k].system_ids.iter().copied());
        if let Some(extra) = extra_gold.get(&k) {
            g.gold_ids.extend(extra.iter().copied());
        }
        if let Some(extra) = extra_system.get(&k) {
            g.system_ids.extend(extra.iter().copied());
        }
    }
    let mut out = Vec::with_capacity(groups.len() + pairs.len() + loose.len());
    for (first, mut link) in groups {
        link.gold_ids.sort();
        link.system_ids.sort();
        out.push((first, 0u8, link));
    }
    for (after, link) in pairs {
        out.push((after, 1, link));
    }
    for link in loose {
        let anchor = link
            .gold_ids
            .first()
            .or(link.system_ids.first())
            .and_then(|id| {
                let base = NodeId::int(id.major());
                g_link.get(&base).or_else(|| s_link.get(&base)).copied()
            })
            .unwrap_or(links.len());
        out.push((anchor, 2, link));
    }
    out.sort_by_key(|(pos, rank, _)| (*pos, *rank));
    Alignment {
        links: out.into_iter().map(|(_, _, l)| l).collect(),
    }
}
