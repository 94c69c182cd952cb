//! The decoupled three-stage annotation pipeline: spoken-phenomena
//! handling (SPH), language-specific refinement (LSR), core UD annotation,
//! then a deterministic verification and repair pass.

pub mod agent;
pub mod checks;
pub mod edits;
pub mod envelope;
pub mod pipeline;
pub mod prompts;
pub mod vr;

pub use agent::{extract_json, run_core, run_lsr, run_sph, run_stage, sph_input, AgentError, StageRun};
pub use checks::{check_core, check_envelope, check_lsr, check_sph, Violation, ViolationCode};
pub use edits::{EditError, IdMapDelta};
pub use envelope::{CoreOutput, CoreToken, EnvelopeToken, IdMap, LsrOutput, SphOutput, StageEnvelope};
pub use pipeline::{parse_batch, parse_sentence, DecapConfig, FailureKind, SentenceFailure, DEFAULT_WHITELIST};
pub use prompts::{PromptError, PromptSet, PromptVars, StagePrompt};
pub use vr::{apply_whitelist, finalize, map_spoken_labels, FinalParse, FinalizeError, Repair, RepairKind, VrConfig};
