use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Mutex;

use serde_json::Value;

use super::{Backend, BackendError, CompletionRequest, Stage};

/// Replies scripted per sentence and stage. Successive calls for the same
/// pair walk through the list; the last reply repeats once it runs out.
///
/// The JSON form is `{"<sentence_id>": {"sph": [reply, ...], ...}}`, where a
/// reply is either a string or any JSON value (sent as compact JSON).
#[derive(Debug, Default)]
pub struct ScriptedBackend {
    replies: HashMap<(String, Stage), Vec<String>>,
    calls: Mutex<HashMap<(String, Stage), usize>>,
}

impl ScriptedBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sentence_id: impl Into<String>, stage: Stage, reply: impl Into<String>) {
        self.replies.entry((sentence_id.into(), stage)).or_default().push(reply.into());
    }

    pub fn from_json(text: &str) -> Result<Self, BackendError> {
        let raw: BTreeMap<String, BTreeMap<Stage, Vec<Value>>> =
            serde_json::from_str(text).map_err(|e| BackendError::Config(format!("script: {e}")))?;
        let mut backend = Self::new();
        for (sid, stages) in raw {
            for (stage, replies) in stages {
                for r in replies {
                    let text = match r {
                        Value::String(s) => s,
                        other => other.to_string(),
                    };
                    backend.push(sid.clone(), stage, text);
                }
            }
        }
        Ok(backend)
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let text = std::fs::read_to_string(path).map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

impl Backend for ScriptedBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let key = (request.sentence_id.clone(), request.stage);
        let replies = self.replies.get(&key).filter(|r| !r.is_empty()).ok_or_else(|| BackendError::StubNoMatch {
            sentence_id: request.sentence_id.clone(),
            stage: request.stage,
        })?;
        let mut calls = self.calls.lock().expect("call counter poisoned");
        let n = calls.entry(key).or_insert(0);
        let reply = replies[(*n).min(replies.len() - 1)].clone();
        *n += 1;
        Ok(reply)
    }
}
