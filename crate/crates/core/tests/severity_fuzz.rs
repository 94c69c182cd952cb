mod common;

use std::collections::BTreeSet;

use spokeud_core::flexud::{
    evaluate, FlexConfig, IssueClass, PenaltySchedule, Severity, CATASTROPHIC_RANGE, MINOR_RANGE,
};

#[test]
fn contributions_stay_in_band_over_fuzz_corpus() {
    let mut rng = common::rng(0x5E7E);
    let cfg = FlexConfig::default();
    let mut seen = BTreeSet::new();
    let mut catastrophic = 0usize;
    for i in 0..3000 {
        let gold = common::random_sentence(&mut rng, &format!("f{i}"));
        let system = common::perturb(&mut rng, &gold);
        let eval = evaluate(&gold, &system, &cfg).unwrap();
        let sev = &eval.score.severity;
        let sum: f64 = sev.issues.iter().map(|i| i.contribution).sum();
        assert!(sev.p <= 0.95 + 1e-12, "P = {} for {i}", sev.p);
        assert!((sev.p - sum.min(0.95)).abs() < 1e-12);
        for issue in &sev.issues {
            seen.insert(format!("{:?}", issue.class));
            let (lo, hi) = match issue.severity {
                Severity::Catastrophic => {
                    catastrophic += 1;
                    CATASTROPHIC_RANGE
                }
                Severity::Minor => MINOR_RANGE,
            };
            assert!(
                issue.contribution >= lo && issue.contribution <= hi,
                "{:?} contributes {} outside [{lo}, {hi}]",
                issue.class,
                issue.contribution
            );
        }
        assert!(eval.score.final_score <= 100);
    }
    assert!(catastrophic > 0);
    // The corpus has to reach every issue class for the bound to mean much.
    for class in [
        IssueClass::MissingDottedMwe,
        IssueClass::ReparandumMisattached,
        IssueClass::InvalidHeadPersisting,
        IssueClass::MultipleRootsOrCycle,
        IssueClass::TolerantUposSubstitution,
        IssueClass::NearMissDeprel,
        IssueClass::MinorMismatch,
    ] {
        assert!(seen.contains(&format!("{class:?}")), "{class:?} never triggered");
    }
}

#[test]
fn cap_holds_when_everything_is_wrong() {
    let mut rng = common::rng(7);
    let cfg = FlexConfig::default();
    let mut capped = false;
    for i in 0..500 {
        let gold = common::random_sentence(&mut rng, &format!("c{i}"));
        let mut system = gold.clone();
        for _ in 0..6 {
            system = common::perturb(&mut rng, &system);
        }
        let p = evaluate(&gold, &system, &cfg).unwrap().score.severity.p;
        assert!(p <= 0.95 + 1e-12);
        capped |= (p - 0.95).abs() < 1e-12;
    }
    assert!(capped, "no instance reached the cap");
}

#[test]
fn default_schedule_is_inside_bands() {
    PenaltySchedule::default().validate().unwrap();
}
