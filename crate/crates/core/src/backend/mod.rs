//! Completion backends: live HTTP, record/replay, a pattern-table stub, a
//! per-sentence script and plain closures for tests.

mod config;
mod http;
mod replay;
mod scripted;
mod stub;

pub use config::{BackendConfig, BackendMode, DEFAULT_API_KEY_ENV};
pub use http::HttpBackend;
pub use replay::{RecordingBackend, ReplayBackend, ReplayEntry, ReplayFile, ReplayStore};
pub use scripted::ScriptedBackend;
pub use stub::{StubBackend, StubRule};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Model-backed pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Sph,
    Lsr,
    Core,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Sph, Stage::Lsr, Stage::Core];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Sph => "sph",
            Stage::Lsr => "lsr",
            Stage::Core => "core",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub sentence_id: String,
    pub stage: Stage,
    pub system: String,
    pub user: String,
}

impl CompletionRequest {
    /// Hex SHA-256 over both prompts with line endings normalized to `\n`.
    pub fn content_hash(&self) -> String {
        let norm = |s: &str| s.replace("\r\n", "\n").replace('\r', "\n");
        let mut h = Sha256::new();
        h.update(norm(&self.system).as_bytes());
        h.update([0u8]);
        h.update(norm(&self.user).as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("request timed out")]
    Timeout,
    #[error("HTTP status {code}: {body}")]
    HttpStatus { code: u16, body: String },
    #[error("no recorded response for {sentence_id}/{stage} with prompt hash {key}")]
    ReplayMiss {
        key: String,
        sentence_id: String,
        stage: Stage,
    },
    #[error("credential environment variable {var} is not set")]
    AuthMissing { var: String },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("malformed completion payload: {0}")]
    InvalidResponse(String),
    #[error("replay store: {0}")]
    Store(String),
    #[error("invalid backend configuration: {0}")]
    Config(String),
    #[error("stub table has no rule for {sentence_id}/{stage}")]
    StubNoMatch { sentence_id: String, stage: Stage },
}

/// Anything that can turn a prompt pair into raw model text.
pub trait Backend: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError>;
}

impl<F> Backend for F
where
    F: Fn(&CompletionRequest) -> Result<String, BackendError> + Send + Sync,
{
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        self(request)
    }
}

impl<B: Backend + ?Sized> Backend for Arc<B> {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        (**self).complete(request)
    }
}

/// Builds the backend a configuration describes.
pub fn from_config(config: &BackendConfig) -> Result<Arc<dyn Backend>, BackendError> {
    config.validate()?;
    Ok(match config.mode {
        BackendMode::Live => Arc::new(HttpBackend::from_config(config)?),
        BackendMode::Record => {
            let live = HttpBackend::from_config(config)?;
            let store = ReplayStore::new(config.replay_dir.clone().expect("validated"));
            Arc::new(RecordingBackend::new(live, store))
        }
        BackendMode::Replay => Arc::new(ReplayBackend::new(ReplayStore::new(
            config.replay_dir.clone().expect("validated"),
        ))),
        BackendMode::Stub => {
            let path = config.stub_table.as_ref().expect("validated");
            Arc::new(StubBackend::load(path)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(system: &str, user: &str) -> CompletionRequest {
        CompletionRequest {
            sentence_id: "s".into(),
            stage: Stage::Sph,
            system: system.into(),
            user: user.into(),
        }
    }

    #[test]
    fn hash_ignores_line_ending_style() {
        assert_eq!(req("a\r\nb", "c\r\n").content_hash(), req("a\nb", "c\n").content_hash());
        assert_ne!(req("ab", "c").content_hash(), req("a", "bc").content_hash());
        assert_eq!(req("", "").content_hash().len(), 64);
    }

    #[test]
    fn closures_are_backends() {
        let b = |r: &CompletionRequest| Ok::<_, BackendError>(r.user.to_uppercase());
        assert_eq!(b.complete(&req("", "hi")).unwrap(), "HI");
    }
}
