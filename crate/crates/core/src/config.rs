//! Toolkit configuration file (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::BackendConfig;
use crate::decap::{DecapConfig, PromptError, PromptSet, VrConfig, DEFAULT_WHITELIST};
use crate::flexud::{FlexConfig, FlexConfigError};
use crate::ud::RelationSet;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error(transparent)]
    Flex(#[from] FlexConfigError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("pipeline.workers must be at least 1")]
    NoWorkers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub max_retries: u32,
    pub workers: usize,
    pub whitelist: Vec<String>,
    /// Directory with replacement prompt templates.
    pub prompt_dir: Option<PathBuf>,
    /// Allowed relations; the full UD inventory when absent.
    pub relations: Option<Vec<String>>,
}

impl Default for PipelineSection {
    fn default() -> Self {
        PipelineSection {
            max_retries: 2,
            workers: 4,
            whitelist: DEFAULT_WHITELIST.iter().map(|s| s.to_string()).collect(),
            prompt_dir: None,
            relations: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolkitConfig {
    pub pipeline: PipelineSection,
    pub repair: VrConfig,
    pub flexud: FlexConfig,
    pub backend: BackendConfig,
}

impl ToolkitConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::parse(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(x) = p.as_mut() {
                if x.is_relative() {
                    *x = base.join(&*x);
                }
            }
        };
        fix(&mut self.pipeline.prompt_dir);
        fix(&mut self.backend.replay_dir);
        fix(&mut self.backend.stub_table);
    }

    pub fn relations(&self) -> RelationSet {
        match &self.pipeline.relations {
            Some(labels) => RelationSet::new(labels),
            None => RelationSet::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pipeline.workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        self.flexud.validate(&self.relations())?;
        Ok(())
    }

    pub fn decap_config(&self) -> Result<DecapConfig, ConfigError> {
        let prompts = match &self.pipeline.prompt_dir {
            Some(dir) => PromptSet::with_overrides(dir)?,
            None => PromptSet::default(),
        };
        let mut vr = self.repair.clone();
        vr.relations = self.relations();
        Ok(DecapConfig {
            max_retries: self.pipeline.max_retries,
            whitelist: self.pipeline.whitelist.clone(),
            prompts,
            vr,
        })
    }
}
