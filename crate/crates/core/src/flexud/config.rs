use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ud::{base_relation, RelationSet, Upos};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlexConfigError {
    #[error("weights must be non-negative and sum to 1, got sum {sum}")]
    WeightSumInvalid { sum: f64 },
    #[error("{field} = {value} lies outside [{min}, {max}]")]
    OutOfRange {
        field: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("tolerance class references unknown relation {label:?}")]
    UnknownRelation { label: String },
}

/// Component weights for (Split, ID, UPOS, HEAD, DEPREL).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Weights {
    pub w_split: f64,
    pub w_id: f64,
    pub w_upos: f64,
    pub w_head: f64,
    pub w_deprel: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            w_split: 0.15,
            w_id: 0.15,
            w_upos: 0.20,
            w_head: 0.25,
            w_deprel: 0.25,
        }
    }
}

impl Weights {
    pub fn equal() -> Self {
        Weights {
            w_split: 0.2,
            w_id: 0.2,
            w_upos: 0.2,
            w_head: 0.2,
            w_deprel: 0.2,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.w_split, self.w_id, self.w_upos, self.w_head, self.w_deprel]
    }

    pub fn validate(&self) -> Result<(), FlexConfigError> {
        let w = self.as_array();
        let sum: f64 = w.iter().sum();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(FlexConfigError::WeightSumInvalid { sum });
        }
        Ok(())
    }
}

/// Partial credit for near-miss tags and relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Unordered UPOS pairs.
    pub upos_pairs: Vec<(Upos, Upos)>,
    pub upos_credit: f64,
    /// Relation classes, compared on base labels.
    pub deprel_classes: Vec<Vec<String>>,
    pub deprel_credit: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let class = |ls: &[&str]| ls.iter().map(|s| s.to_string()).collect();
        ToleranceConfig {
            upos_pairs: vec![(Upos::Verb, Upos::Aux), (Upos::Det, Upos::Pron), (Upos::Propn, Upos::Noun)],
            upos_credit: 0.8,
            deprel_classes: vec![
                class(&["obj", "obl", "iobj"]),
                class(&["advmod", "discourse"]),
                class(&["ccomp", "xcomp"]),
            ],
            deprel_credit: 0.8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self, relations: &RelationSet) -> Result<(), FlexConfigError> {
        in_range("upos_credit", self.upos_credit, 0.0, 1.0)?;
        in_range("deprel_credit", self.deprel_credit, 0.0, 1.0)?;
        for label in self.deprel_classes.iter().flatten() {
            if !relations.contains(label) {
                return Err(FlexConfigError::UnknownRelation { label: label.clone() });
            }
        }
        Ok(())
    }

    pub fn upos_credit(&self, gold: Option<Upos>, system: Option<Upos>) -> f64 {
        match (gold, system) {
            (g, s) if g == s => 1.0,
            (Some(g), Some(s)) if self.upos_pairs.iter().any(|&(a, b)| (a, b) == (g, s) || (b, a) == (g, s)) => {
                self.upos_credit
            }
            _ => 0.0,
        }
    }

    pub fn deprel_credit(&self, gold: Option<&str>, system: Option<&str>) -> f64 {
        match (gold, system) {
            (g, s) if g == s => 1.0,
            (Some(g), Some(s)) => {
                let (g, s) = (base_relation(g), base_relation(s));
                let near = self
                    .deprel_classes
                    .iter()
                    .any(|c| c.iter().any(|l| l == g) && c.iter().any(|l| l == s));
                if near {
                    self.deprel_credit
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }
}

/// Per-issue penalty contributions and the cap on their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltySchedule {
    pub missing_dotted_mwe: f64,
    pub reparandum_misattached: f64,
    pub invalid_head_persisting: f64,
    pub multiple_roots_or_cycle: f64,
    pub tolerant_upos_substitution: f64,
    pub near_miss_deprel: f64,
    pub minor_mismatch: f64,
    pub cap: f64,
}

impl Default for PenaltySchedule {
    fn default() -> Self {
        PenaltySchedule {
            missing_dotted_mwe: 0.30,
            reparandum_misattached: 0.25,
            invalid_head_persisting: 0.40,
            multiple_roots_or_cycle: 0.50,
            tolerant_upos_substitution: 0.01,
            near_miss_deprel: 0.01,
            minor_mismatch: 0.02,
            cap: 0.95,
        }
    }
}

pub const CATASTROPHIC_RANGE: (f64, f64) = (0.25, 0.6);
pub const MINOR_RANGE: (f64, f64) = (0.01, 0.05);

fn in_range(field: &'static str, value: f64, min: f64, max: f64) -> Result<(), FlexConfigError> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(FlexConfigError::OutOfRange { field, value, min, max })
    }
}

impl PenaltySchedule {
    pub fn validate(&self) -> Result<(), FlexConfigError> {
        let (cl, ch) = CATASTROPHIC_RANGE;
        let (ml, mh) = MINOR_RANGE;
        in_range("missing_dotted_mwe", self.missing_dotted_mwe, cl, ch)?;
        in_range("reparandum_misattached", self.reparandum_misattached, cl, ch)?;
        in_range("invalid_head_persisting", self.invalid_head_persisting, cl, ch)?;
        in_range("multiple_roots_or_cycle", self.multiple_roots_or_cycle, cl, ch)?;
        in_range("tolerant_upos_substitution", self.tolerant_upos_substitution, ml, mh)?;
        in_range("near_miss_deprel", self.near_miss_deprel, ml, mh)?;
        in_range("minor_mismatch", self.minor_mismatch, ml, mh)?;
        in_range("cap", self.cap, 0.0, 0.95)
    }
}

/// Everything FLEX-UD scoring needs besides the two sentences.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlexConfig {
    pub weights: Weights,
    pub tolerance: ToleranceConfig,
    pub penalties: PenaltySchedule,
}

impl FlexConfig {
    pub fn validate(&self, relations: &RelationSet) -> Result<(), FlexConfigError> {
        self.weights.validate()?;
        self.tolerance.validate(relations)?;
        self.penalties.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        FlexConfig::default().validate(&RelationSet::default()).unwrap();
    }

    #[test]
    fn weights_must_sum_to_one() {
        let w = Weights {
            w_split: 0.5,
            ..Weights::default()
        };
        assert!(matches!(w.validate(), Err(FlexConfigError::WeightSumInvalid { .. })));
        Weights::equal().validate().unwrap();
    }

    #[test]
    fn credits_are_symmetric() {
        let t = ToleranceConfig::default();
        assert_eq!(t.upos_credit(Some(Upos::Aux), Some(Upos::Verb)), 0.8);
        assert_eq!(t.upos_credit(Some(Upos::Verb), Some(Upos::Aux)), 0.8);
        assert_eq!(t.upos_credit(Some(Upos::Verb), Some(Upos::Noun)), 0.0);
        assert_eq!(t.deprel_credit(Some("obl:tmod"), Some("obj")), 0.8);
        assert_eq!(t.deprel_credit(Some("obj"), Some("obj")), 1.0);
        assert_eq!(t.deprel_credit(Some("obj"), Some("nsubj")), 0.0);
    }

    #[test]
    fn schedule_outside_band_is_rejected() {
        let s = PenaltySchedule {
            minor_mismatch: 0.2,
            ..PenaltySchedule::default()
        };
        assert!(matches!(s.validate(), Err(FlexConfigError::OutOfRange { field: "minor_mismatch", .. })));
    }
}
