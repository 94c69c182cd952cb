//! Sentence and batch drivers for the three-stage pipeline.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use tracing::{info, info_span, warn};

use super::agent::{run_core, run_lsr, run_sph, AgentError};
use super::checks::Violation;
use super::envelope::{CoreOutput, LsrOutput, SphOutput};
use super::prompts::PromptSet;
use super::vr::{apply_whitelist, finalize, FinalParse, VrConfig};
use crate::backend::{Backend, Stage};
use crate::ud::Sentence;

pub const DEFAULT_WHITELIST: [&str; 3] = ["pitta bread", "you know", "a lot"];

#[derive(Debug, Clone)]
pub struct DecapConfig {
    /// Extra attempts per stage after a rejected output.
    pub max_retries: u32,
    pub whitelist: Vec<String>,
    pub prompts: PromptSet,
    pub vr: VrConfig,
}

impl Default for DecapConfig {
    fn default() -> Self {
        DecapConfig {
            max_retries: 2,
            whitelist: DEFAULT_WHITELIST.iter().map(|s| s.to_string()).collect(),
            prompts: PromptSet::default(),
            vr: VrConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Backend,
    Schema,
    Finalize,
}

/// A sentence the pipeline could not finish, with whatever stage outputs
/// were produced before the failure.
#[derive(Debug, Clone, PartialEq, Serialize, Error)]
#[error("sentence {sentence_id} failed at {stage:?}: {error}")]
pub struct SentenceFailure {
    pub sentence_id: String,
    /// `None` when the failure happened while merging stage outputs.
    pub stage: Option<Stage>,
    pub kind: FailureKind,
    pub error: String,
    pub attempts: u32,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_response: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sph: Option<SphOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lsr: Option<LsrOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core: Option<CoreOutput>,
}

impl SentenceFailure {
    fn from_agent(sentence_id: &str, e: AgentError) -> Self {
        let error = e.to_string();
        let stage = e.stage();
        let (kind, attempts, violations, last_response) = match e {
            AgentError::Backend { .. } => (FailureKind::Backend, 1, Vec::new(), None),
            AgentError::SchemaViolation {
                attempts,
                violations,
                last_response,
                ..
            } => (FailureKind::Schema, attempts, violations, Some(last_response)),
        };
        SentenceFailure {
            sentence_id: sentence_id.to_string(),
            stage: Some(stage),
            kind,
            error,
            attempts,
            violations,
            last_response,
            sph: None,
            lsr: None,
            core: None,
        }
    }
}

/// Runs SPH, LSR (plus the whitelist), Core and the final repair pass.
pub fn parse_sentence(
    input: &Sentence,
    backend: &dyn Backend,
    cfg: &DecapConfig,
) -> Result<FinalParse, SentenceFailure> {
    let id = input.sentence_id.as_str();
    let _span = info_span!("sentence", id).entered();
    let original: Vec<String> = input.tokens.iter().map(|t| t.form.clone()).collect();
    let fail = |e: AgentError| SentenceFailure::from_agent(id, e);

    let sph = run_sph(backend, cfg, input).map_err(fail)?.output;
    let mut lsr = run_lsr(backend, cfg, &sph, &original)
        .map_err(|e| {
            let mut f = fail(e);
            f.sph = Some(sph.clone());
            f
        })?
        .output;
    let whitelist = apply_whitelist(&mut lsr, &cfg.whitelist);
    let core = run_core(backend, cfg, &lsr)
        .map_err(|e| {
            let mut f = fail(e);
            f.sph = Some(sph.clone());
            f.lsr = Some(lsr.clone());
            f
        })?
        .output;

    let mut parse = finalize(&sph, &lsr, &core, &cfg.vr).map_err(|e| SentenceFailure {
        sentence_id: id.to_string(),
        stage: None,
        kind: FailureKind::Finalize,
        error: e.to_string(),
        attempts: 0,
        violations: Vec::new(),
        last_response: None,
        sph: Some(sph.clone()),
        lsr: Some(lsr.clone()),
        core: Some(core.clone()),
    })?;
    parse.sentence.category = input.category;
    if !whitelist.is_empty() {
        let mut log: Vec<String> = whitelist.iter().map(|r| r.message.clone()).collect();
        log.append(&mut parse.adjudication_log);
        parse.adjudication_log = log;
        let mut repairs = whitelist;
        repairs.append(&mut parse.repairs);
        parse.repairs = repairs;
    }
    info!(repairs = parse.repairs.len(), "sentence parsed");
    Ok(parse)
}

/// Parses sentences on `workers` threads; results keep the input order.
pub fn parse_batch(
    inputs: &[Sentence],
    backend: &dyn Backend,
    cfg: &DecapConfig,
    workers: usize,
) -> Vec<Result<FinalParse, SentenceFailure>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<_> = pool.install(|| {
        inputs
            .par_iter()
            .map(|s| parse_sentence(s, backend, cfg))
            .collect()
    });
    let failed = results.iter().filter(|r| r.is_err()).count();
    if failed > 0 {
        warn!(failed, total = inputs.len(), "some sentences failed");
    }
    results
}
