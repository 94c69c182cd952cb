//! Plain Markdown/CSV rendering for per-category score tables.

use std::fmt::Write as _;

use crate::ud::Category;

/// Label of the summary row appended after the category rows.
pub const OVERALL: &str = "Overall";

/// One rendered row: a label and one optional value per column.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub values: Vec<Option<f64>>,
}

/// Row labels in report order, ending with the overall row.
pub fn row_labels() -> Vec<&'static str> {
    Category::ALL
        .iter()
        .map(|c| c.display_name())
        .chain(std::iter::once(OVERALL))
        .collect()
}

/// Markdown table; empty cells render as `-`.
pub fn markdown(columns: &[&str], rows: &[TableRow], decimals: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| Category | {} |", columns.join(" | "));
    let _ = writeln!(out, "|---|{}", "---:|".repeat(columns.len()));
    for row in rows {
        let cells: Vec<String> = row
            .values
            .iter()
            .map(|v| match v {
                Some(x) => format!("{x:.decimals$}"),
                None => "-".to_string(),
            })
            .collect();
        let _ = writeln!(out, "| {} | {} |", row.label, cells.join(" | "));
    }
    out
}

/// CSV table; empty cells render as empty fields.
pub fn csv(columns: &[&str], rows: &[TableRow], decimals: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "category,{}", columns.join(","));
    for row in rows {
        let cells: Vec<String> = row
            .values
            .iter()
            .map(|v| v.map(|x| format!("{x:.decimals$}")).unwrap_or_default())
            .collect();
        let _ = writeln!(out, "{},{}", row.label, cells.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_formats() {
        let rows = vec![
            TableRow {
                label: "Repetition".into(),
                values: vec![Some(0.5), None],
            },
            TableRow {
                label: OVERALL.into(),
                values: vec![Some(1.0), Some(0.25)],
            },
        ];
        assert_eq!(
            markdown(&["A", "B"], &rows, 2),
            "| Category | A | B |\n|---|---:|---:|\n| Repetition | 0.50 | - |\n| Overall | 1.00 | 0.25 |\n"
        );
        assert_eq!(csv(&["A", "B"], &rows, 3), "category,A,B\nRepetition,0.500,\nOverall,1.000,0.250\n");
    }

    #[test]
    fn labels_end_with_none_then_overall() {
        let labels = row_labels();
        assert_eq!(labels.len(), 11);
        assert_eq!(&labels[9..], &["None", "Overall"]);
    }
}
