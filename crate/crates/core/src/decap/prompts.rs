//! Prompt templates for the three model stages.
//!
//! Templates use `{{NAME}}` placeholders. The built-in set is compiled in; a
//! directory holding `<stage>.system.md` / `<stage>.user.md` files can replace
//! any of them.

use std::path::Path;

use thiserror::Error;

use crate::backend::Stage;
use crate::ud::{RelationSet, Upos};

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("reading prompt template {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagePrompt {
    pub system: String,
    pub user: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptSet {
    pub sph: StagePrompt,
    pub lsr: StagePrompt,
    pub core: StagePrompt,
}

impl Default for PromptSet {
    fn default() -> Self {
        PromptSet {
            sph: StagePrompt {
                system: include_str!("../../prompts/sph.system.md").to_string(),
                user: include_str!("../../prompts/sph.user.md").to_string(),
            },
            lsr: StagePrompt {
                system: include_str!("../../prompts/lsr.system.md").to_string(),
                user: include_str!("../../prompts/lsr.user.md").to_string(),
            },
            core: StagePrompt {
                system: include_str!("../../prompts/core.system.md").to_string(),
                user: include_str!("../../prompts/core.user.md").to_string(),
            },
        }
    }
}

/// Values substituted into a template.
#[derive(Debug, Clone, Default)]
pub struct PromptVars<'a> {
    pub input_json: &'a str,
    pub whitelist: &'a [String],
    pub relations: Option<&'a RelationSet>,
}

impl PromptSet {
    /// Built-in templates with any files present in `dir` taking precedence.
    pub fn with_overrides(dir: &Path) -> Result<Self, PromptError> {
        let mut set = PromptSet::default();
        for stage in Stage::ALL {
            for (kind, slot) in [("system", 0), ("user", 1)] {
                let path = dir.join(format!("{stage}.{kind}.md"));
                if !path.exists() {
                    continue;
                }
                let text = std::fs::read_to_string(&path).map_err(|source| PromptError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let p = set.stage_mut(stage);
                if slot == 0 {
                    p.system = text;
                } else {
                    p.user = text;
                }
            }
        }
        Ok(set)
    }

    pub fn stage(&self, stage: Stage) -> &StagePrompt {
        match stage {
            Stage::Sph => &self.sph,
            Stage::Lsr => &self.lsr,
            Stage::Core => &self.core,
        }
    }

    fn stage_mut(&mut self, stage: Stage) -> &mut StagePrompt {
        match stage {
            Stage::Sph => &mut self.sph,
            Stage::Lsr => &mut self.lsr,
            Stage::Core => &mut self.core,
        }
    }

    /// Renders both templates of a stage.
    pub fn render(&self, stage: Stage, vars: &PromptVars<'_>) -> StagePrompt {
        let p = self.stage(stage);
        StagePrompt {
            system: fill(&p.system, vars),
            user: fill(&p.user, vars),
        }
    }
}

fn fill(template: &str, vars: &PromptVars<'_>) -> String {
    let upos = Upos::ALL.iter().map(|u| u.as_str()).collect::<Vec<_>>().join(", ");
    let default_relations = RelationSet::default();
    let relations = vars.relations.unwrap_or(&default_relations);
    let deprel = relations.iter().collect::<Vec<_>>().join(", ");
    let whitelist = if vars.whitelist.is_empty() {
        "(none)".to_string()
    } else {
        vars.whitelist.iter().map(|w| format!("\"{w}\"")).collect::<Vec<_>>().join(", ")
    };
    template
        .replace("{{INPUT_JSON}}", vars.input_json)
        .replace("{{ALLOWED_UPOS}}", &upos)
        .replace("{{ALLOWED_DEPREL}}", &deprel)
        .replace("{{MWE_WHITELIST}}", &whitelist)
}
