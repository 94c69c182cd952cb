use std::path::PathBuf;

use clap::Args;

use spokeud_core::ud::validate_tree;

use crate::error::CliError;
use crate::input;

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// CoNLL-U file, sheet (.tsv) or manifest (.jsonl).
    pub path: PathBuf,
}

pub fn run(args: &ValidateArgs) -> Result<(), CliError> {
    let sentences = input::sentences(&args.path)?;
    let mut bad = 0;
    for s in &sentences {
        let report = validate_tree(s);
        if report.ok {
            println!("{}: ok", s.sentence_id);
            continue;
        }
        bad += 1;
        for issue in &report.issues {
            let ids = issue.node_ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            println!("{}: {} [{ids}] {}", s.sentence_id, issue.code, issue.message);
        }
    }
    println!("{} sentences, {} with issues", sentences.len(), bad);
    if bad == 0 {
        Ok(())
    } else {
        Err(CliError::Invalid(bad))
    }
}
