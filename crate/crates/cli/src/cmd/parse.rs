use std::path::{Path, PathBuf};

use clap::Args;
use tracing::info;

use spokeud_core::backend::{self, Backend, RecordingBackend, ReplayStore, ScriptedBackend};
use spokeud_core::config::ToolkitConfig;
use spokeud_core::decap::{parse_batch, FailureKind, FinalParse, SentenceFailure};
use spokeud_core::io::{emit_conllu, emit_sheet};
use spokeud_core::ud::Sentence;

use crate::error::CliError;
use crate::input;
use crate::BackendArgs;

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Benchmark manifest (JSON lines).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Exit 0 even when some sentences fail.
    #[arg(long)]
    pub allow_failures: bool,
}

#[derive(Debug, Args)]
pub struct RecordArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// JSON file of scripted replies per sentence and stage.
    #[arg(long)]
    pub script: PathBuf,
    #[arg(long)]
    pub replay_dir: PathBuf,
    /// Also write the parse outputs here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

pub fn run(args: &ParseArgs, config: Option<&PathBuf>) -> Result<(), CliError> {
    let mut cfg = crate::load_config(config)?;
    args.backend.apply(&mut cfg);
    cfg.validate()?;
    let backend = backend::from_config(&cfg.backend)?;
    execute(&cfg, &args.manifest, Some(&args.out), backend.as_ref(), args.allow_failures)
}

pub fn record(args: &RecordArgs, config: Option<&PathBuf>) -> Result<(), CliError> {
    let mut cfg = crate::load_config(config)?;
    if let Some(w) = args.workers {
        cfg.pipeline.workers = w;
    }
    cfg.validate()?;
    let script = ScriptedBackend::load(&args.script)?;
    let backend = RecordingBackend::new(script, ReplayStore::new(args.replay_dir.clone()));
    execute(&cfg, &args.manifest, args.out.as_deref(), &backend, false)
}

fn execute(
    cfg: &ToolkitConfig,
    manifest: &Path,
    out: Option<&Path>,
    backend: &dyn Backend,
    allow_failures: bool,
) -> Result<(), CliError> {
    let manifest = input::manifest(manifest)?;
    let inputs: Vec<Sentence> = manifest.entries.iter().map(|e| e.input_sentence()).collect();
    let decap = cfg.decap_config()?;
    let results = parse_batch(&inputs, backend, &decap, cfg.pipeline.workers);

    let mut parses: Vec<&FinalParse> = Vec::new();
    let mut failures: Vec<&SentenceFailure> = Vec::new();
    for r in &results {
        match r {
            Ok(p) => parses.push(p),
            Err(f) => failures.push(f),
        }
    }
    if let Some(out) = out {
        write_outputs(out, &parses, &failures)?;
    }
    for f in &failures {
        let stage = f.stage.map_or("finalize".to_string(), |s| s.to_string());
        eprintln!("failed: {} at {stage}: {}", f.sentence_id, f.error);
    }
    eprintln!(
        "parsed {} of {} sentences, {} failed",
        parses.len(),
        results.len(),
        failures.len()
    );
    info!(parsed = parses.len(), failed = failures.len(), "parse finished");
    if failures.is_empty() || allow_failures {
        Ok(())
    } else {
        Err(CliError::ParseFailures {
            failed: failures.len(),
            total: results.len(),
            backend: failures.iter().any(|f| f.kind == FailureKind::Backend),
        })
    }
}

fn write_outputs(out: &Path, parses: &[&FinalParse], failures: &[&SentenceFailure]) -> Result<(), CliError> {
    let sentences: Vec<Sentence> = parses.iter().map(|p| p.sentence.clone()).collect();
    input::write(&out.join("parsed.conllu"), &emit_conllu(&sentences))?;
    input::write(&out.join("parsed.tsv"), &emit_sheet(&sentences))?;
    input::write(&out.join("final_parses.jsonl"), &input::jsonl(parses))?;
    input::write(&out.join("failures.jsonl"), &input::jsonl(failures))
}
