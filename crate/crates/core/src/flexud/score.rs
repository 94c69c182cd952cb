use serde::{Deserialize, Serialize};

use super::components::ComponentScores;
use super::config::{FlexConfigError, Weights};
use super::severity::SeverityReport;

/// Rounds halves upwards. A tiny epsilon absorbs binary noise that leaves a
/// product just below an exact half.
pub fn round_half_up(x: f64) -> i64 {
    (x + 0.5 + 1e-9).floor() as i64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexScore {
    pub components: ComponentScores,
    pub weights: Weights,
    pub raw: f64,
    pub severity: SeverityReport,
    #[serde(rename = "final")]
    pub final_score: u32,
    pub diagnostics: Vec<String>,
}

pub fn flexud_final(
    components: ComponentScores,
    weights: Weights,
    severity: SeverityReport,
) -> Result<FlexScore, FlexConfigError> {
    weights.validate()?;
    let raw: f64 = weights
        .as_array()
        .iter()
        .zip(components.as_array())
        .map(|(w, s)| w * s as f64)
        .sum();
    let final_score = round_half_up(raw * (1.0 - severity.p)).clamp(0, 100) as u32;

    let mut diagnostics: Vec<String> = severity
        .issues
        .iter()
        .map(|i| format!("{:?} (+{:.2}): {}", i.class, i.contribution, i.note))
        .collect();
    let names = ["Split", "ID", "UPOS", "HEAD", "DEPREL"];
    for (name, value) in names.iter().zip(components.as_array()) {
        if value < 50 {
            diagnostics.push(format!("{name} component low: {value}"));
        }
    }
    Ok(FlexScore {
        components,
        weights,
        raw,
        severity,
        final_score,
        diagnostics,
    })
}
