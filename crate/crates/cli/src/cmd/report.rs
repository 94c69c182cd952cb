use std::path::{Path, PathBuf};

use clap::Args;

use spokeud_core::ud::Category;

use super::eval::{print_tables, render, SentenceRecord};
use crate::error::CliError;
use crate::input;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// scores.jsonl written by `eval`.
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub by_category: bool,
    /// Manifest whose category distribution is added as distribution.csv.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &ReportArgs) -> Result<(), CliError> {
    let text = input::read(&args.scores)?;
    let records = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<SentenceRecord>(l)
                .map_err(|e| CliError::input(&args.scores, format!("line {}: {e}", i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut files = render(&records, args.by_category);
    if let Some(m) = &args.manifest {
        files.push(("distribution.csv".into(), distribution(m)?));
    }
    if let Some(out) = &args.out {
        for (name, body) in &files {
            input::write(&out.join(name), body)?;
        }
    }
    print_tables(&files);
    Ok(())
}

fn distribution(path: &Path) -> Result<String, CliError> {
    let m = input::manifest(path)?;
    let actual = m.distribution();
    let declared = m.header.map(|h| h.declared_counts).unwrap_or_default();
    let mut out = String::from("category,declared,actual\n");
    for c in Category::ALL {
        let d = declared.get(c.label()).map(|n| n.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{d},{}\n", c.label(), actual.get(&c).copied().unwrap_or(0)));
    }
    Ok(out)
}
