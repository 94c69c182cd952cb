use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use spokeud_core::flexud::{self, flexud_report, FlexConfig, FlexResult, FlexScore};
use spokeud_core::metrics::{aggregate_by_category, attachment_scores, SentenceScores, StandardScores};
use spokeud_core::table::OVERALL;
use spokeud_core::ud::{Category, Sentence};

use crate::error::CliError;
use crate::input;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Standard,
    Flexud,
    Both,
}

impl Metric {
    fn standard(self) -> bool {
        matches!(self, Metric::Standard | Metric::Both)
    }

    fn flexud(self) -> bool {
        matches!(self, Metric::Flexud | Metric::Both)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Gold trees: CoNLL-U, sheet (.tsv) or manifest (.jsonl).
    #[arg(long)]
    pub gold: PathBuf,
    /// System trees in any of the same formats.
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub metric: Metric,
    /// Add a row per category before the overall row.
    #[arg(long)]
    pub by_category: bool,
    /// Directory for scores.jsonl and the table files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// One line of scores.jsonl.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub sentence_id: String,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard: Option<StandardScores>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flexud: Option<FlexScore>,
}

pub fn run(args: &EvalArgs, config: Option<&PathBuf>) -> Result<(), CliError> {
    let mut cfg = crate::load_config(config)?;
    if let Some(w) = args.workers {
        cfg.pipeline.workers = w;
    }
    cfg.validate()?;
    let gold = input::sentences(&args.gold)?;
    let system = input::sentences(&args.system)?;
    let pairs = pair_up(&gold, &system)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.pipeline.workers.max(1))
        .build()
        .expect("thread pool");
    let records: Vec<SentenceRecord> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(g, s)| score_pair(g, s, &cfg.flexud, args.metric))
            .collect::<Result<_, _>>()
    })?;

    let files = render(&records, args.by_category);
    if let Some(out) = &args.out {
        input::write(&out.join("scores.jsonl"), &input::jsonl(&records))?;
        for (name, body) in &files {
            input::write(&out.join(name), body)?;
        }
    }
    print_tables(&files);
    Ok(())
}

/// Gold order, each gold sentence with the system sentence of the same id.
fn pair_up<'a>(gold: &'a [Sentence], system: &'a [Sentence]) -> Result<Vec<(&'a Sentence, &'a Sentence)>, CliError> {
    let by_id: HashMap<&str, &Sentence> = system.iter().map(|s| (s.sentence_id.as_str(), s)).collect();
    let gold_ids: BTreeSet<&str> = gold.iter().map(|s| s.sentence_id.as_str()).collect();
    let sys_ids: BTreeSet<&str> = by_id.keys().copied().collect();
    if gold_ids != sys_ids || gold_ids.len() != gold.len() || sys_ids.len() != system.len() {
        let dupes = |v: &[Sentence]| {
            let mut seen = BTreeSet::new();
            v.iter()
                .filter(|s| !seen.insert(s.sentence_id.as_str()))
                .map(|s| format!("{} (duplicate)", s.sentence_id))
                .collect::<Vec<_>>()
        };
        let mut gold_only: Vec<String> = gold_ids.difference(&sys_ids).map(|s| s.to_string()).collect();
        gold_only.extend(dupes(gold));
        let mut system_only: Vec<String> = sys_ids.difference(&gold_ids).map(|s| s.to_string()).collect();
        system_only.extend(dupes(system));
        return Err(CliError::SentenceIdMismatch { gold_only, system_only });
    }
    Ok(gold.iter().map(|g| (g, by_id[g.sentence_id.as_str()])).collect())
}

fn score_pair(gold: &Sentence, system: &Sentence, cfg: &FlexConfig, metric: Metric) -> Result<SentenceRecord, CliError> {
    let ev = flexud::evaluate(gold, system, cfg)?;
    let standard = if metric.standard() {
        Some(
            attachment_scores(gold, system, &ev.alignment).map_err(|source| CliError::Metrics {
                sentence_id: gold.sentence_id.clone(),
                source,
            })?,
        )
    } else {
        None
    };
    Ok(SentenceRecord {
        sentence_id: gold.sentence_id.clone(),
        category: gold.category.or(system.category).unwrap_or(Category::None),
        standard,
        flexud: metric.flexud().then_some(ev.score),
    })
}

/// Table files for whichever metrics the records carry, as (file name, contents).
pub fn render(records: &[SentenceRecord], by_category: bool) -> Vec<(String, String)> {
    let keep = |label: &str| by_category || label == OVERALL;
    let mut files = Vec::new();
    let standard: Vec<SentenceScores> = records
        .iter()
        .filter_map(|r| {
            r.standard.map(|scores| SentenceScores {
                sentence_id: r.sentence_id.clone(),
                category: r.category,
                scores,
            })
        })
        .collect();
    if !standard.is_empty() {
        let mut table = aggregate_by_category(&standard);
        table.rows.retain(|r| keep(&r.label));
        files.push(("standard.md".into(), table.to_markdown()));
        files.push(("standard.csv".into(), table.to_csv()));
    }
    let flex: Vec<FlexResult> = records
        .iter()
        .filter_map(|r| {
            r.flexud.clone().map(|score| FlexResult {
                sentence_id: r.sentence_id.clone(),
                category: r.category,
                score,
            })
        })
        .collect();
    if !flex.is_empty() {
        let mut table = flexud_report(&flex);
        table.rows.retain(|r| keep(&r.label));
        files.push(("flexud.md".into(), table.to_markdown()));
        files.push(("flexud.csv".into(), table.to_csv()));
        files.push(("flexud_extended.md".into(), table.to_markdown_extended()));
        files.push(("flexud_extended.csv".into(), table.to_csv_extended()));
    }
    files
}

pub fn print_tables(files: &[(String, String)]) {
    for (name, body) in files {
        if let Some(stem) = name.strip_suffix(".md") {
            if !stem.ends_with("_extended") {
                println!("## {stem}\n\n{body}");
            }
        }
    }
}
