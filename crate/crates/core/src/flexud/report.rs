use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::score::FlexScore;
use crate::table::{self, TableRow, OVERALL};
use crate::ud::Category;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexResult {
    pub sentence_id: String,
    pub category: Category,
    pub score: FlexScore,
}

/// Per-row means of the per-sentence scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FlexMeans {
    pub split: f64,
    pub id: f64,
    pub upos: f64,
    pub head: f64,
    pub deprel: f64,
    #[serde(rename = "final")]
    pub final_score: f64,
    pub raw: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexRow {
    pub label: String,
    pub category: Option<Category>,
    pub sentences: usize,
    pub means: Option<FlexMeans>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexTable {
    pub rows: Vec<FlexRow>,
}

pub const FLEX_COLUMNS: [&str; 5] = ["ID", "UPOS", "HEAD", "DEPREL", "Final"];
pub const FLEX_EXTENDED_COLUMNS: [&str; 7] = ["Split", "ID", "UPOS", "HEAD", "DEPREL", "Final", "P"];

#[derive(Default, Clone, Copy)]
struct Sum {
    n: usize,
    v: [f64; 8],
}

impl Sum {
    fn add(&mut self, s: &FlexScore) {
        let c = s.components;
        let vals = [
            c.s_split as f64,
            c.s_id as f64,
            c.s_upos as f64,
            c.s_head as f64,
            c.s_deprel as f64,
            s.final_score as f64,
            s.raw,
            s.severity.p,
        ];
        self.n += 1;
        for (acc, x) in self.v.iter_mut().zip(vals) {
            *acc += x;
        }
    }

    fn means(&self) -> Option<FlexMeans> {
        (self.n > 0).then(|| {
            let m = self.v.map(|x| x / self.n as f64);
            FlexMeans {
                split: m[0],
                id: m[1],
                upos: m[2],
                head: m[3],
                deprel: m[4],
                final_score: m[5],
                raw: m[6],
                p: m[7],
            }
        })
    }
}

pub fn flexud_report(results: &[FlexResult]) -> FlexTable {
    let mut per: BTreeMap<Category, Sum> = BTreeMap::new();
    let mut overall = Sum::default();
    for r in results {
        per.entry(r.category).or_default().add(&r.score);
        overall.add(&r.score);
    }
    let mut rows: Vec<FlexRow> = Category::ALL
        .iter()
        .map(|c| {
            let sum = per.get(c).copied().unwrap_or_default();
            FlexRow {
                label: c.display_name().to_string(),
                category: Some(*c),
                sentences: sum.n,
                means: sum.means(),
            }
        })
        .collect();
    rows.push(FlexRow {
        label: OVERALL.to_string(),
        category: None,
        sentences: overall.n,
        means: overall.means(),
    });
    FlexTable { rows }
}

impl FlexTable {
    fn table_rows(&self, extended: bool) -> Vec<TableRow> {
        self.rows
            .iter()
            .map(|r| {
                let values = match &r.means {
                    Some(m) if extended => [m.split, m.id, m.upos, m.head, m.deprel, m.final_score, m.p]
                        .map(Some)
                        .to_vec(),
                    Some(m) => [m.id, m.upos, m.head, m.deprel, m.final_score].map(Some).to_vec(),
                    None if extended => vec![None; FLEX_EXTENDED_COLUMNS.len()],
                    None => vec![None; FLEX_COLUMNS.len()],
                };
                TableRow {
                    label: r.label.clone(),
                    values,
                }
            })
            .collect()
    }

    pub fn to_markdown(&self) -> String {
        table::markdown(&FLEX_COLUMNS, &self.table_rows(false), 1)
    }

    pub fn to_csv(&self) -> String {
        table::csv(&FLEX_COLUMNS, &self.table_rows(false), 2)
    }

    /// Adds the Split component and mean penalty.
    pub fn to_markdown_extended(&self) -> String {
        table::markdown(&FLEX_EXTENDED_COLUMNS, &self.table_rows(true), 1)
    }

    pub fn to_csv_extended(&self) -> String {
        table::csv(&FLEX_EXTENDED_COLUMNS, &self.table_rows(true), 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexud::{flexud_final, ComponentScores, SeverityReport, Weights};

    fn result(id: &str, category: Category, p: f64) -> FlexResult {
        FlexResult {
            sentence_id: id.into(),
            category,
            score: flexud_final(ComponentScores::perfect(), Weights::default(), SeverityReport { issues: vec![], p }).unwrap(),
        }
    }

    #[test]
    fn final_is_averaged() {
        let t = flexud_report(&[result("a", Category::None, 0.4), result("b", Category::None, 0.2)]);
        let none = &t.rows[9];
        assert_eq!(none.sentences, 2);
        assert!((none.means.unwrap().final_score - 70.0).abs() < 1e-9);
    }

    #[test]
    fn header_in_component_order() {
        let md = flexud_report(&[]).to_markdown();
        assert!(md.starts_with("| Category | ID | UPOS | HEAD | DEPREL | Final |\n"));
        assert!(md.trim_end().ends_with("| Overall | - | - | - | - | - |"));
    }
}
