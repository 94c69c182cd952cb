use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};
use tracing::{debug, warn};

use super::{Backend, BackendConfig, BackendError, CompletionRequest};

/// Blocking client for an OpenAI-style chat-completions endpoint.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
    model: String,
    temperature: f64,
    max_tokens: u32,
    retries: u32,
    backoff: Duration,
    gate: Gate,
}

/// Counting semaphore capping concurrent requests.
struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
    cap: usize,
}

impl Gate {
    fn acquire(&self) -> GateGuard<'_> {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.cap {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

impl HttpBackend {
    pub fn from_config(config: &BackendConfig) -> Result<Self, BackendError> {
        let base = config
            .base_url
            .as_deref()
            .ok_or_else(|| BackendError::Config("base_url is required".into()))?;
        let api_key = config.api_key()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(HttpBackend {
            client,
            endpoint: format!("{}/chat/completions", base.trim_end_matches('/')),
            api_key,
            model: config.model_name.clone(),
            temperature: config.temperature,
            max_tokens: config.max_tokens,
            retries: config.retries,
            backoff: Duration::from_millis(500),
            gate: Gate {
                in_flight: Mutex::new(0),
                freed: Condvar::new(),
                cap: config.max_in_flight.max(1),
            },
        })
    }

    /// Shortens the pause between retries; tests use this to stay fast.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    fn attempt(&self, body: &Value) -> Result<String, BackendError> {
        let resp = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    BackendError::Timeout
                } else {
                    BackendError::Transport(e.to_string())
                }
            })?;
        let status = resp.status();
        let text = resp.text().map_err(|e| BackendError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::HttpStatus {
                code: status.as_u16(),
                body: text.chars().take(500).collect(),
            });
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| BackendError::InvalidResponse(e.to_string()))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| BackendError::InvalidResponse("missing choices[0].message.content".into()))
    }
}

fn transient(e: &BackendError) -> bool {
    match e {
        BackendError::Timeout | BackendError::Transport(_) => true,
        BackendError::HttpStatus { code, .. } => *code == 429 || *code >= 500,
        _ => false,
    }
}

impl Backend for HttpBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let body = json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        });
        let _slot = self.gate.acquire();
        let mut attempt = 0;
        loop {
            debug!(sentence = %request.sentence_id, stage = %request.stage, attempt, "completion request");
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(e) if attempt < self.retries && transient(&e) => {
                    let pause = self.backoff * 2u32.pow(attempt);
                    warn!(error = %e, ?pause, "transient backend failure, retrying");
                    thread::sleep(pause);
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}
