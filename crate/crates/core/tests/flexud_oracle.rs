mod common;

use std::time::Instant;

use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::Rng;

use spokeud_core::flexud::{
    flexud_final, ComponentScores, IssueClass, PenaltySchedule, SeverityIssue, SeverityReport, Weights,
};

const CLASSES: [IssueClass; 7] = [
    IssueClass::MissingDottedMwe,
    IssueClass::ReparandumMisattached,
    IssueClass::InvalidHeadPersisting,
    IssueClass::MultipleRootsOrCycle,
    IssueClass::TolerantUposSubstitution,
    IssueClass::NearMissDeprel,
    IssueClass::MinorMismatch,
];

/// Exact integer re-derivation. Weights and contributions are whole
/// hundredths, so the weighted sum times (1 - P) is an integer count of
/// 1/10000 points and half-up rounding needs no floating point.
fn oracle(scores: [u32; 5], weights: [u32; 5], contributions: &[u32], cap: u32) -> u32 {
    let raw: u64 = scores.iter().zip(weights).map(|(s, w)| *s as u64 * w as u64).sum();
    let p = contributions.iter().sum::<u32>().min(cap) as u64;
    let scaled = raw * (100 - p);
    ((scaled + 5_000) / 10_000).min(100) as u32
}

fn hundredths(x: f64) -> u32 {
    (x * 100.0).round() as u32
}

fn weights_from(h: [u32; 5]) -> Weights {
    Weights {
        w_split: h[0] as f64 / 100.0,
        w_id: h[1] as f64 / 100.0,
        w_upos: h[2] as f64 / 100.0,
        w_head: h[3] as f64 / 100.0,
        w_deprel: h[4] as f64 / 100.0,
    }
}

fn components(v: [u32; 5]) -> ComponentScores {
    ComponentScores {
        s_split: v[0],
        s_id: v[1],
        s_upos: v[2],
        s_head: v[3],
        s_deprel: v[4],
    }
}

fn issue(class: IssueClass, schedule: &PenaltySchedule) -> SeverityIssue {
    SeverityIssue {
        class,
        severity: class.severity(),
        contribution: class.contribution(schedule),
        node_ids: Vec::new(),
        note: String::new(),
    }
}

#[test]
fn aggregation_matches_integer_oracle_on_1000_instances() {
    let mut rng = common::rng(0xF1E7);
    let schedule = PenaltySchedule::default();
    let start = Instant::now();
    for case in 0..1000 {
        let scores: [u32; 5] = std::array::from_fn(|_| rng.random_range(1..=100));
        let weights: [u32; 5] = if case % 2 == 0 {
            [15, 15, 20, 25, 25]
        } else {
            let mut cuts: Vec<u32> = (0..4).map(|_| rng.random_range(0..=100)).collect();
            cuts.sort();
            [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], cuts[3] - cuts[2], 100 - cuts[3]]
        };
        let n_issues = rng.random_range(0..=5);
        let issues: Vec<SeverityIssue> =
            (0..n_issues).map(|_| issue(*CLASSES.choose(&mut rng).unwrap(), &schedule)).collect();
        let contributions: Vec<u32> = issues.iter().map(|i| hundredths(i.contribution)).collect();
        let severity = SeverityReport::from_issues(issues, schedule.cap);

        let got = flexud_final(components(scores), weights_from(weights), severity).unwrap();
        let want = oracle(scores, weights, &contributions, hundredths(schedule.cap));
        assert_eq!(
            got.final_score, want,
            "case {case}: scores {scores:?} weights {weights:?} contributions {contributions:?}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
}

#[test]
fn exact_half_rounds_up() {
    // 49 * (1 - 0.5) = 24.5
    let sev = SeverityReport { issues: Vec::new(), p: 0.5 };
    let f = flexud_final(components([49; 5]), Weights::default(), sev).unwrap();
    assert_eq!(f.final_score, 25);
    assert_eq!(oracle([49; 5], [15, 15, 20, 25, 25], &[50], 95), 25);
    let sev = SeverityReport { issues: Vec::new(), p: 0.0 };
    let f = flexud_final(components([1, 1, 1, 1, 2]), weights_from([0, 0, 0, 50, 50]), sev).unwrap();
    assert_eq!(f.final_score, 2);
}

proptest! {
    #[test]
    fn final_is_bounded_and_monotone_in_penalty(
        scores in proptest::array::uniform5(1u32..=100),
        p1 in 0u32..=95,
        p2 in 0u32..=95,
    ) {
        let (lo, hi) = (p1.min(p2), p1.max(p2));
        let at = |p: u32| {
            let sev = SeverityReport { issues: Vec::new(), p: p as f64 / 100.0 };
            flexud_final(components(scores), Weights::default(), sev).unwrap().final_score
        };
        prop_assert!(at(lo) <= 100);
        prop_assert!(at(hi) <= at(lo));
    }

    #[test]
    fn final_is_monotone_in_each_component(
        scores in proptest::array::uniform5(1u32..=99),
        which in 0usize..5,
        p in 0u32..=95,
    ) {
        let sev = || SeverityReport { issues: Vec::new(), p: p as f64 / 100.0 };
        let mut better = scores;
        better[which] += 1;
        let a = flexud_final(components(scores), Weights::default(), sev()).unwrap().final_score;
        let b = flexud_final(components(better), Weights::default(), sev()).unwrap().final_score;
        prop_assert!(b >= a);
    }
}
