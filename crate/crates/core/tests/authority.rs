//! Precedence between stages: LSR owns tokenization, upstream spoken labels
//! win over Core relations, and LSR labels win over SPH labels.

mod common;

use proptest::prelude::*;
use rand::Rng;

use spokeud_core::decap::{finalize, CoreOutput, CoreToken, LsrOutput, VrConfig};
use spokeud_core::ud::{validate_tree, Head, NodeId, SpokenLabel};

/// A well-formed Core reply: a chain rooted at the first annotatable node.
fn chain_core(lsr: &LsrOutput) -> CoreOutput {
    let comps = lsr.skeleton().mwe_components();
    let mut prev: Option<NodeId> = None;
    let rows = lsr
        .tokens
        .iter()
        .map(|t| {
            let mut row = CoreToken {
                id: t.id,
                form: t.split_token.clone(),
                lemma: None,
                upos: None,
                head: None,
                head_form: None,
                deprel: None,
                core_confidence: Some(0.9),
                core_notes: String::new(),
            };
            if !comps.contains(&t.id) {
                row.upos = Some("NOUN".into());
                row.head = Some(prev.map(Head::Node).unwrap_or(Head::Root));
                row.deprel = Some(if prev.is_some() { "nmod" } else { "root" }.into());
                prev = Some(t.id);
            }
            row
        })
        .collect();
    CoreOutput {
        sentence_id: lsr.sentence_id.clone(),
        annotated_tokens: rows,
        summary_notes: String::new(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn upstream_labels_override_core_and_lsr_overrides_sph(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let mut env = common::random_envelopes(&mut rng, "auth");
        for t in env.lsr.tokens.iter_mut() {
            if rng.random_bool(0.2) {
                t.spoken_label = Some(SpokenLabel::Discourse);
            }
        }
        let core = chain_core(&env.lsr);
        let root = core.annotated_tokens.iter().find(|t| t.head == Some(Head::Root)).map(|t| t.id);
        let p = finalize(&env.sph, &env.lsr, &core, &VrConfig::default()).unwrap();
        prop_assert!(validate_tree(&p.sentence).ok);

        let ids: Vec<NodeId> = p.sentence.tokens.iter().map(|t| t.id).collect();
        let lsr_ids: Vec<NodeId> = env.lsr.tokens.iter().map(|t| t.id).collect();
        prop_assert_eq!(ids, lsr_ids);

        let comps = p.sentence.mwe_components();
        let repaired: Vec<NodeId> = p.repairs.iter().filter(|r| r.kind.penalized()).filter_map(|r| r.node).collect();
        for t in p.sentence.tokens.iter().filter(|t| !comps.contains(&t.id)) {
            let lsr_label = env.lsr.get(t.id).unwrap().spoken_label;
            if lsr_label.is_some() {
                prop_assert_eq!(t.spoken_label, lsr_label);
            }
            if Some(t.id) == root {
                prop_assert_eq!(t.head, Some(Head::Root));
                continue;
            }
            let expected = match t.spoken_label {
                Some(SpokenLabel::Reparandum) => "reparandum",
                Some(SpokenLabel::Discourse) | Some(SpokenLabel::Filler) => "discourse",
                Some(SpokenLabel::Dep) => "dep",
                // Unlabeled nodes keep Core's relation unless a logged repair moved them.
                None if repaired.contains(&t.id) => continue,
                None => "nmod",
            };
            prop_assert_eq!(t.deprel.as_deref(), Some(expected), "node {}", t.id);
        }
    }
}
