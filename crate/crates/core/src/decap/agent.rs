//! One model call per stage, with output validation and repair retries.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;
use tracing::{debug, warn};

use super::checks::{check_core, check_lsr, check_sph, Violation, ViolationCode};
use super::envelope::{CoreOutput, LsrOutput, SphOutput};
use super::pipeline::DecapConfig;
use super::prompts::PromptVars;
use crate::backend::{Backend, BackendError, CompletionRequest, Stage};
use crate::ud::Sentence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("{stage} backend call failed: {source}")]
    Backend {
        stage: Stage,
        #[source]
        source: BackendError,
    },
    #[error("{stage} output still invalid after {attempts} attempts ({} violations)", violations.len())]
    SchemaViolation {
        stage: Stage,
        attempts: u32,
        violations: Vec<Violation>,
        last_response: String,
    },
}

impl AgentError {
    pub fn stage(&self) -> Stage {
        match self {
            AgentError::Backend { stage, .. } | AgentError::SchemaViolation { stage, .. } => *stage,
        }
    }
}

/// A validated stage output and how many calls it took.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRun<T> {
    pub output: T,
    pub attempts: u32,
    pub raw: String,
}

/// Pulls one JSON object out of a model reply, tolerating code fences and
/// surrounding prose.
pub fn extract_json(raw: &str) -> Result<Value, Violation> {
    let mut text = raw.trim();
    if let Some(rest) = text.strip_prefix("```") {
        let rest = rest.trim_start_matches(|c: char| c.is_ascii_alphabetic());
        text = rest.rsplit_once("```").map_or(rest, |(body, _)| body).trim();
    }
    let parsed = serde_json::from_str::<Value>(text).or_else(|first| {
        match (text.find('{'), text.rfind('}')) {
            (Some(a), Some(b)) if a < b => serde_json::from_str::<Value>(&text[a..=b]),
            _ => Err(first),
        }
    });
    match parsed {
        Ok(v) if v.is_object() => Ok(v),
        Ok(_) => Err(Violation::new(ViolationCode::NotObject, None, "the reply must be a single JSON object")),
        Err(e) => Err(Violation::new(ViolationCode::NotJson, None, format!("the reply is not valid JSON: {e}"))),
    }
}

fn repair_block(violations: &[Violation]) -> String {
    let listed = serde_json::to_string_pretty(violations).unwrap_or_default();
    format!(
        "\n\nREPAIR REQUIRED. Your previous answer was rejected for the reasons below. \
         Return the complete corrected JSON object.\n\n```json\n{listed}\n```\n"
    )
}

/// Calls the backend until the parsed output passes `validate` or the retry
/// budget runs out.
pub fn run_stage<T, F>(
    backend: &dyn Backend,
    cfg: &DecapConfig,
    stage: Stage,
    sentence_id: &str,
    input_json: &str,
    validate: F,
) -> Result<StageRun<T>, AgentError>
where
    T: DeserializeOwned,
    F: Fn(&T) -> Vec<Violation>,
{
    let base = cfg.prompts.render(
        stage,
        &PromptVars {
            input_json,
            whitelist: &cfg.whitelist,
            relations: Some(&cfg.vr.relations),
        },
    );
    let mut violations: Vec<Violation> = Vec::new();
    let mut raw = String::new();
    let max_attempts = cfg.max_retries + 1;
    for attempt in 1..=max_attempts {
        let mut user = base.user.clone();
        if !violations.is_empty() {
            user.push_str(&repair_block(&violations));
        }
        let request = CompletionRequest {
            sentence_id: sentence_id.to_string(),
            stage,
            system: base.system.clone(),
            user,
        };
        raw = backend
            .complete(&request)
            .map_err(|source| AgentError::Backend { stage, source })?;
        violations = match extract_json(&raw) {
            Err(v) => vec![v],
            Ok(value) => match serde_json::from_value::<T>(value) {
                Err(e) => vec![Violation::new(ViolationCode::Schema, None, e.to_string())],
                Ok(output) => {
                    let v = validate(&output);
                    if v.is_empty() {
                        debug!(%sentence_id, %stage, attempt, "stage output accepted");
                        return Ok(StageRun {
                            output,
                            attempts: attempt,
                            raw,
                        });
                    }
                    v
                }
            },
        };
        warn!(%sentence_id, %stage, attempt, count = violations.len(), "stage output rejected");
    }
    Err(AgentError::SchemaViolation {
        stage,
        attempts: max_attempts,
        violations,
        last_response: raw,
    })
}

/// Input shown to the first stage.
pub fn sph_input(sentence: &Sentence) -> Value {
    let tokens: Vec<Value> = sentence
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            json!({
                "token_index": t.orig_token_index.unwrap_or(i as u32 + 1),
                "form": t.form,
                "lang_tag": t.lang_tag.as_str(),
            })
        })
        .collect();
    json!({ "sentence_id": sentence.sentence_id, "tokens": tokens })
}

pub fn run_sph(backend: &dyn Backend, cfg: &DecapConfig, sentence: &Sentence) -> Result<StageRun<SphOutput>, AgentError> {
    let original: Vec<String> = sentence.tokens.iter().map(|t| t.form.clone()).collect();
    let input = sph_input(sentence).to_string();
    run_stage(backend, cfg, Stage::Sph, &sentence.sentence_id, &input, |o: &SphOutput| {
        check_sph(o, &sentence.sentence_id, &original)
    })
}

pub fn run_lsr(
    backend: &dyn Backend,
    cfg: &DecapConfig,
    sph: &SphOutput,
    original: &[String],
) -> Result<StageRun<LsrOutput>, AgentError> {
    let input = serde_json::to_string(sph).expect("envelopes serialize");
    run_stage(backend, cfg, Stage::Lsr, &sph.sentence_id, &input, |o: &LsrOutput| {
        check_lsr(o, sph, original)
    })
}

pub fn run_core(backend: &dyn Backend, cfg: &DecapConfig, lsr: &LsrOutput) -> Result<StageRun<CoreOutput>, AgentError> {
    let input = serde_json::to_string(lsr).expect("envelopes serialize");
    run_stage(backend, cfg, Stage::Core, &lsr.sentence_id, &input, |o: &CoreOutput| {
        check_core(o, lsr, &cfg.vr.relations)
    })
}
