use std::path::Path;

use regex::Regex;
use serde::Deserialize;

use super::{Backend, BackendError, CompletionRequest, Stage};

/// One row of the stub's pattern table. The first rule whose stage and
/// regular expression both match the request wins.
#[derive(Debug, Clone)]
pub struct StubRule {
    pub stage: Option<Stage>,
    pub pattern: Regex,
    pub response: String,
}

#[derive(Deserialize)]
struct RawRule {
    stage: Option<Stage>,
    #[serde(default = "match_all")]
    pattern: String,
    response: String,
}

fn match_all() -> String {
    String::new()
}

#[derive(Deserialize)]
struct RawTable {
    #[serde(default)]
    rule: Vec<RawRule>,
}

/// Deterministic canned responses for offline runs and tests.
#[derive(Debug, Clone, Default)]
pub struct StubBackend {
    rules: Vec<StubRule>,
}

impl StubBackend {
    pub fn new(rules: Vec<StubRule>) -> Self {
        StubBackend { rules }
    }

    /// Parses a TOML table of `[[rule]]` entries with `stage`, `pattern` and `response`.
    pub fn from_toml(text: &str) -> Result<Self, BackendError> {
        let raw: RawTable = toml::from_str(text).map_err(|e| BackendError::Config(e.to_string()))?;
        let rules = raw
            .rule
            .into_iter()
            .map(|r| {
                Ok(StubRule {
                    stage: r.stage,
                    pattern: Regex::new(&r.pattern).map_err(|e| BackendError::Config(e.to_string()))?,
                    response: r.response,
                })
            })
            .collect::<Result<_, BackendError>>()?;
        Ok(StubBackend { rules })
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let text = std::fs::read_to_string(path).map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

impl Backend for StubBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        self.rules
            .iter()
            .find(|r| r.stage.is_none_or(|s| s == request.stage) && r.pattern.is_match(&request.user))
            .map(|r| r.response.clone())
            .ok_or_else(|| BackendError::StubNoMatch {
                sentence_id: request.sentence_id.clone(),
                stage: request.stage,
            })
    }
}
