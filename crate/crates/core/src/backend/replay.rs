use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use tracing::debug;

use super::{Backend, BackendError, CompletionRequest, Stage};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub request_hash: String,
    pub raw_response: String,
    pub timestamp: String,
}

/// Contents of one `{sentence_id}.{stage}.json` file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayFile {
    pub sentence_id: String,
    pub stage: Stage,
    pub entries: Vec<ReplayEntry>,
}

/// A directory of recorded responses keyed by prompt hash.
#[derive(Debug)]
pub struct ReplayStore {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

fn file_stem(sentence_id: &str) -> String {
    sentence_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

impl ReplayStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayStore {
            dir: dir.into(),
            write_lock: Mutex::new(()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, sentence_id: &str, stage: Stage) -> PathBuf {
        self.dir.join(format!("{}.{}.json", file_stem(sentence_id), stage))
    }

    fn read(&self, path: &Path) -> Result<Option<ReplayFile>, BackendError> {
        match fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| BackendError::Store(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(BackendError::Store(format!("{}: {e}", path.display()))),
        }
    }

    pub fn lookup(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let key = request.content_hash();
        let path = self.path_for(&request.sentence_id, request.stage);
        let hit = self
            .read(&path)?
            .and_then(|f| f.entries.into_iter().find(|e| e.request_hash == key));
        match hit {
            Some(e) => Ok(e.raw_response),
            None => Err(BackendError::ReplayMiss {
                key,
                sentence_id: request.sentence_id.clone(),
                stage: request.stage,
            }),
        }
    }

    /// Stores a response, replacing any earlier entry for the same prompt hash.
    pub fn record(&self, request: &CompletionRequest, raw_response: &str) -> Result<(), BackendError> {
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        fs::create_dir_all(&self.dir).map_err(|e| BackendError::Store(e.to_string()))?;
        let path = self.path_for(&request.sentence_id, request.stage);
        let mut file = self.read(&path)?.unwrap_or_else(|| ReplayFile {
            sentence_id: request.sentence_id.clone(),
            stage: request.stage,
            entries: Vec::new(),
        });
        let key = request.content_hash();
        file.entries.retain(|e| e.request_hash != key);
        file.entries.push(ReplayEntry {
            request_hash: key,
            raw_response: raw_response.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        });
        let text = serde_json::to_string_pretty(&file).map_err(|e| BackendError::Store(e.to_string()))?;
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text + "\n").map_err(|e| BackendError::Store(e.to_string()))?;
        fs::rename(&tmp, &path).map_err(|e| BackendError::Store(e.to_string()))?;
        debug!(path = %path.display(), "recorded response");
        Ok(())
    }
}

pub struct ReplayBackend {
    store: ReplayStore,
}

impl ReplayBackend {
    pub fn new(store: ReplayStore) -> Self {
        ReplayBackend { store }
    }
}

impl Backend for ReplayBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        self.store.lookup(request)
    }
}

/// Forwards to another backend and persists every successful response.
pub struct RecordingBackend<B> {
    inner: B,
    store: ReplayStore,
}

impl<B: Backend> RecordingBackend<B> {
    pub fn new(inner: B, store: ReplayStore) -> Self {
        RecordingBackend { inner, store }
    }
}

impl<B: Backend> Backend for RecordingBackend<B> {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let text = self.inner.complete(request)?;
        self.store.record(request, &text)?;
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(user: &str) -> CompletionRequest {
        CompletionRequest {
            sentence_id: "a/b".into(),
            stage: Stage::Lsr,
            system: "sys".into(),
            user: user.into(),
        }
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let echo = |r: &CompletionRequest| Ok::<_, BackendError>(format!("{{\"echo\":{:?}}}", r.user));
        let rec = RecordingBackend::new(echo, ReplayStore::new(dir.path()));
        let first = rec.complete(&req("one")).unwrap();
        rec.complete(&req("two")).unwrap();
        let replay = ReplayBackend::new(ReplayStore::new(dir.path()));
        assert_eq!(replay.complete(&req("one")).unwrap(), first);
        assert_eq!(replay.complete(&req("one")).unwrap(), first);
        assert!(dir.path().join("a_b.lsr.json").exists());
    }

    #[test]
    fn miss_reports_the_hash() {
        let dir = tempfile::tempdir().unwrap();
        let replay = ReplayBackend::new(ReplayStore::new(dir.path()));
        let r = req("nothing");
        match replay.complete(&r) {
            Err(BackendError::ReplayMiss { key, .. }) => assert_eq!(key, r.content_hash()),
            other => panic!("expected a miss, got {other:?}"),
        }
    }
}
