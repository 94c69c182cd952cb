mod common;

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use spokeud_core::backend::{Backend, BackendError, CompletionRequest, Stage};
use spokeud_core::decap::{apply_whitelist, finalize, parse_sentence, CoreOutput, DecapConfig, FinalParse, VrConfig};
use spokeud_core::ud::{validate_tree, Head, LangTag, NodeId, Sentence, Token};

fn check_parse(p: &FinalParse, lsr: &spokeud_core::decap::LsrOutput, case: usize) {
    let report = validate_tree(&p.sentence);
    assert!(report.ok, "case {case}: {:?}", report.issues);
    assert_eq!(p.adjudication_log.len(), p.repairs.len(), "case {case}");
    for (line, r) in p.adjudication_log.iter().zip(&p.repairs) {
        assert_eq!(line, &r.message);
    }
    // Tokenization is never changed after LSR.
    let ids: Vec<NodeId> = p.sentence.tokens.iter().map(|t| t.id).collect();
    let lsr_ids: Vec<NodeId> = lsr.tokens.iter().map(|t| t.id).collect();
    assert_eq!(ids, lsr_ids, "case {case}");
    assert_eq!(p.rows.len(), ids.len());
    for t in &p.sentence.tokens {
        let c = t.confidences["final"];
        assert!((0.0..=1.0).contains(&c));
        assert!((0.0..=1.0).contains(&t.penalty));
    }
}

/// Every node whose head differs from the head Core proposed is named by
/// some repair.
fn changes_are_logged(p: &FinalParse, core: &CoreOutput, case: usize) {
    let proposed: HashMap<NodeId, Option<Head>> = core.annotated_tokens.iter().map(|t| (t.id, t.head)).collect();
    let named: HashSet<NodeId> = p.repairs.iter().filter_map(|r| r.node).collect();
    let comps = p.sentence.mwe_components();
    for t in p.sentence.tokens.iter().filter(|t| !comps.contains(&t.id)) {
        if proposed.get(&t.id).copied().flatten() != t.head {
            assert!(named.contains(&t.id), "case {case}: head of {} changed without a log entry", t.id);
        }
    }
}

#[test]
fn ten_thousand_adversarial_agent_runs_end_in_valid_trees() {
    let mut rng = common::rng(0xADD5);
    let cfg = DecapConfig::default();
    let start = Instant::now();
    let mut retried = 0;
    let mut repaired = 0;
    for case in 0..10_000 {
        let id = format!("fz{case}");
        let env = common::random_envelopes(&mut rng, &id);
        // Core sees the LSR output after whitelist multiword nodes are added.
        let mut lsr = env.lsr.clone();
        apply_whitelist(&mut lsr, &cfg.whitelist);
        let wild = common::adversarial_core(&mut rng, &lsr);
        let tame = common::passable(&mut rng, &wild, &lsr);
        let replies: HashMap<Stage, Vec<String>> = HashMap::from([
            (Stage::Sph, vec![serde_json::to_string(&env.sph).unwrap()]),
            (Stage::Lsr, vec![serde_json::to_string(&env.lsr).unwrap()]),
            (
                Stage::Core,
                vec![serde_json::to_string(&wild).unwrap(), serde_json::to_string(&tame).unwrap()],
            ),
        ]);
        let calls = std::sync::Mutex::new(HashMap::<Stage, usize>::new());
        let backend = |req: &CompletionRequest| -> Result<String, BackendError> {
            let mut c = calls.lock().unwrap();
            let n = c.entry(req.stage).or_default();
            let list = &replies[&req.stage];
            let reply = list[(*n).min(list.len() - 1)].clone();
            *n += 1;
            Ok(reply)
        };
        let mut input = Sentence::new(
            id.clone(),
            env.original
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let mut t = Token::new(NodeId::int(i as u32 + 1), f.clone());
                    t.lang_tag = LangTag::Unknown;
                    t
                })
                .collect(),
        );
        input.metadata.clear();
        let parse = parse_sentence(&input, &backend as &dyn Backend, &cfg)
            .unwrap_or_else(|e| panic!("case {case}: {e}"));
        if calls.lock().unwrap()[&Stage::Core] > 1 {
            retried += 1;
        }
        if parse.repairs.iter().any(|r| r.kind.penalized()) {
            repaired += 1;
        }
        let used = if calls.lock().unwrap()[&Stage::Core] > 1 { &tame } else { &wild };
        check_parse(&parse, &lsr, case);
        changes_are_logged(&parse, used, case);
    }
    let elapsed = start.elapsed();
    assert!(retried > 1000 && repaired > 1000, "retried {retried}, repaired {repaired}");
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
}

#[test]
fn ten_thousand_raw_adversarial_core_outputs_are_repaired() {
    let mut rng = common::rng(0xBAD);
    let cfg = VrConfig::default();
    let start = Instant::now();
    for case in 0..10_000 {
        let env = common::random_envelopes(&mut rng, "raw");
        let core = common::adversarial_core(&mut rng, &env.lsr);
        let parse = finalize(&env.sph, &env.lsr, &core, &cfg).unwrap_or_else(|e| panic!("case {case}: {e}"));
        check_parse(&parse, &env.lsr, case);
    }
    assert!(start.elapsed().as_secs() < 30);
}
