//! FLEX-UD: alignment-aware component scores, severity penalties and the
//! aggregated final score.

mod align;
mod components;
mod config;
mod report;
mod score;
mod severity;

pub use align::{align_tokens, normalize_form, Alignment, AlignmentError, Link, LinkKind};
pub use components::{component_scores, ComponentScores};
pub use config::{
    FlexConfig, FlexConfigError, PenaltySchedule, ToleranceConfig, Weights, CATASTROPHIC_RANGE, MINOR_RANGE,
};
pub use report::{flexud_report, FlexMeans, FlexResult, FlexRow, FlexTable, FLEX_COLUMNS, FLEX_EXTENDED_COLUMNS};
pub use score::{flexud_final, round_half_up, FlexScore};
pub use severity::{detect_severity, IssueClass, Severity, SeverityIssue, SeverityReport};

use serde::{Deserialize, Serialize};

use crate::ud::Sentence;

/// A score together with the alignment it was computed over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexEvaluation {
    pub alignment: Alignment,
    pub score: FlexScore,
}

/// Aligns, scores and penalizes one system sentence against its gold tree.
pub fn evaluate(gold: &Sentence, system: &Sentence, config: &FlexConfig) -> Result<FlexEvaluation, FlexConfigError> {
    let alignment = align_tokens(gold, system);
    let components = component_scores(gold, system, &alignment, &config.tolerance);
    let severity = detect_severity(gold, system, &alignment, &config.tolerance, &config.penalties);
    let score = flexud_final(components, config.weights, severity)?;
    Ok(FlexEvaluation { alignment, score })
}
