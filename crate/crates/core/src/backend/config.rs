use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::BackendError;

pub const DEFAULT_API_KEY_ENV: &str = "SPOKEUD_API_KEY";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendMode {
    Live,
    Record,
    #[default]
    Replay,
    Stub,
}

impl std::str::FromStr for BackendMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "live" => Ok(BackendMode::Live),
            "record" => Ok(BackendMode::Record),
            "replay" => Ok(BackendMode::Replay),
            "stub" => Ok(BackendMode::Stub),
            other => Err(format!("unknown backend mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub mode: BackendMode,
    /// Root of an OpenAI-style API; `/chat/completions` is appended.
    pub base_url: Option<String>,
    pub model_name: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_secs: u64,
    /// Extra attempts after a transient failure.
    pub retries: u32,
    pub replay_dir: Option<PathBuf>,
    pub stub_table: Option<PathBuf>,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub max_in_flight: usize,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            mode: BackendMode::Replay,
            base_url: None,
            model_name: "gpt-4.1".to_string(),
            temperature: 0.0,
            max_tokens: 4096,
            timeout_secs: 120,
            retries: 2,
            replay_dir: None,
            stub_table: None,
            api_key_env: DEFAULT_API_KEY_ENV.to_string(),
            max_in_flight: 4,
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), BackendError> {
        let need = |what: &str| Err(BackendError::Config(format!("{:?} mode requires {what}", self.mode)));
        match self.mode {
            BackendMode::Replay if self.replay_dir.is_none() => return need("replay_dir"),
            BackendMode::Record if self.replay_dir.is_none() => return need("replay_dir"),
            BackendMode::Live | BackendMode::Record if self.base_url.is_none() => return need("base_url"),
            BackendMode::Stub if self.stub_table.is_none() => return need("stub_table"),
            _ => {}
        }
        if self.max_in_flight == 0 {
            return Err(BackendError::Config("max_in_flight must be at least 1".into()));
        }
        Ok(())
    }

    /// Reads the bearer token from the configured environment variable.
    pub fn api_key(&self) -> Result<String, BackendError> {
        match std::env::var(&self.api_key_env) {
            Ok(k) if !k.trim().is_empty() => Ok(k),
            _ => Err(BackendError::AuthMissing {
                var: self.api_key_env.clone(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_needs_a_directory() {
        let c = BackendConfig::default();
        assert!(matches!(c.validate(), Err(BackendError::Config(_))));
        let c = BackendConfig {
            replay_dir: Some("r".into()),
            ..BackendConfig::default()
        };
        c.validate().unwrap();
    }

    #[test]
    fn live_needs_a_url() {
        let c = BackendConfig {
            mode: BackendMode::Live,
            ..BackendConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn missing_credentials() {
        let c = BackendConfig {
            api_key_env: "SPOKEUD_TEST_UNSET_VARIABLE".into(),
            ..BackendConfig::default()
        };
        assert!(matches!(c.api_key(), Err(BackendError::AuthMissing { .. })));
    }
}
