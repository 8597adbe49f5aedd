use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use chatfsm_core::diff::{apply_renaming, categorize, find_renaming, structural_diff, DiffCategory};
use chatfsm_core::filter::filter_fsm_regex;
use chatfsm_core::fsm::{parse_fsm_json, serialize_fsm_json, Fsm, FsmDocument, StateNode};
use chatfsm_core::retrieval::{retrieve_with_budget, Index};
use chatfsm_core::viz::{syntax, to_dot, DotOptions};
use proptest::prelude::*;

const OUTCOMES: &[&str] = &["done", "failed", "arrived", "spoken", "retry", "found", "preempted"];

/// Valid machines over up to eight states with unique outcomes per state.
fn arb_fsm() -> impl Strategy<Value = Fsm> {
    (1usize..=8)
        .prop_flat_map(|n| {
            let state = prop::collection::btree_map(0..OUTCOMES.len(), 0..n, 0..=3);
            (Just(n), 0..n, prop::collection::vec(state, n))
        })
        .prop_map(|(n, initial, tables)| {
            let name = |i: usize| format!("S{i}");
            let mut fsm = Fsm::new("F", name(initial));
            for (i, table) in tables.into_iter().enumerate().take(n) {
                let mut s = StateNode::new(name(i));
                for (o, t) in table {
                    s = s.with_transition(OUTCOMES[o], name(t));
                }
                fsm.states.push(s);
            }
            fsm
        })
}

/// The same machine with states and outcomes relabeled bijectively.
fn relabeled(fsm: &Fsm, perm: &[usize], suffix: &str) -> Fsm {
    let state = |l: &str| {
        let i: usize = l[1..].parse().unwrap();
        format!("R{}", perm[i])
    };
    let mut out = fsm.clone();
    out.initial_state = state(fsm.initial_state.as_str()).into();
    for s in &mut out.states {
        s.name = state(s.name.as_str()).into();
        for t in &mut s.transitions {
            t.to = state(t.to.as_str()).into();
            t.outcome = format!("{}{suffix}", t.outcome).into();
        }
    }
    out.states.reverse();
    out
}

fn to_set(items: Vec<chatfsm_core::DiffItem>) -> HashSet<chatfsm_core::DiffItem> {
    items.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn self_diff_is_empty(fsm in arb_fsm()) {
        let doc: FsmDocument = fsm.into();
        prop_assert!(structural_diff(&doc, &doc).is_empty());
        prop_assert_eq!(categorize(&doc, &doc).category, DiffCategory::NoDifference);
    }

    #[test]
    fn serialize_parse_round_trip(fsm in arb_fsm()) {
        let doc: FsmDocument = fsm.into();
        let text = serialize_fsm_json(&doc).unwrap();
        let back = parse_fsm_json(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_fsm_json(&back).unwrap(), text);
    }

    #[test]
    fn condition_alias_parses_identically(fsm in arb_fsm()) {
        let text = serialize_fsm_json(&fsm.into()).unwrap();
        let legacy = text.replace("\"outcome\":", "\"condition\":");
        prop_assert_eq!(parse_fsm_json(&legacy).unwrap(), parse_fsm_json(&text).unwrap());
    }

    #[test]
    fn swapping_arguments_flips_items(a in arb_fsm(), b in arb_fsm()) {
        let (a, b): (FsmDocument, FsmDocument) = (a.into(), b.into());
        let forward: HashSet<_> = structural_diff(&a, &b).iter().map(|i| i.flipped()).collect();
        prop_assert_eq!(forward, to_set(structural_diff(&b, &a)));
    }

    #[test]
    fn relabeled_machines_have_a_sound_renaming(
        fsm in arb_fsm(),
        seed in prop::collection::vec(any::<u32>(), 8),
    ) {
        let mut perm: Vec<usize> = (0..fsm.states.len()).collect();
        perm.sort_by_key(|&i| seed[i]);
        let b = relabeled(&fsm, &perm, "_x");
        let r = find_renaming(&fsm, &b).expect("a relabeling is always a renaming");
        let back = apply_renaming(&b, &r);
        prop_assert!(structural_diff(&fsm.clone().into(), &back.into()).is_empty());
        prop_assert_eq!(r.states[b.initial_state.as_str()].as_str(), fsm.initial_state.as_str());
    }

    #[test]
    fn any_renaming_found_is_sound(a in arb_fsm(), b in arb_fsm()) {
        if let Some(r) = find_renaming(&a, &b) {
            let back = apply_renaming(&b, &r);
            prop_assert!(structural_diff(&a.into(), &back.into()).is_empty());
        }
    }

    #[test]
    fn dot_output_parses_with_expected_counts(fsm in arb_fsm()) {
        let text = to_dot(&fsm.clone().into(), &DotOptions::default()).unwrap();
        let graphs = syntax::parse(&text).unwrap();
        prop_assert_eq!(graphs.len(), 1);
        prop_assert_eq!(graphs[0].nodes.len(), fsm.states.len() + 1);
        prop_assert_eq!(graphs[0].edges.len(), fsm.edge_count() + 1);
    }

    #[test]
    fn filter_spans_are_ordered_source_slices(
        parts in prop::collection::vec(prop::sample::select(vec![
            "class A(smach.StateMachine):\n    def __init__(self):\n        pass\n",
            "class B(object):\n    x = 1\n",
            "\"\"\"doc\"\"\"\n",
            "if __name__ == '__main__':\n    main()\n",
            "import smach\n",
            "class C(smach.StateMachine):\n    \"\"\"Doc.\"\"\"\n    def __init__(self):\n        pass\n",
            "\n",
        ]), 0..12)
    ) {
        let source = parts.concat();
        let spans = filter_fsm_regex(&source, Path::new("gen.py"));
        let mut last = 0;
        for s in &spans {
            prop_assert!(s.start_byte >= last);
            prop_assert_eq!(&source[s.start_byte..s.end_byte], s.text.as_str());
            prop_assert!(s.text.starts_with("class"));
            last = s.end_byte;
        }
    }

    #[test]
    fn irrelevant_file_keeps_single_term_ranking(
        docs in prop::collection::vec(prop::collection::vec(prop::sample::select(vec!["alpha", "beta", "gamma", "delta"]), 1..30), 2..6),
        filler_lines in 1usize..120,
    ) {
        let files: BTreeMap<String, String> = docs
            .iter()
            .enumerate()
            .map(|(i, words)| (format!("f{i}.py"), words.join("\n")))
            .collect();
        let before = Index::from_files(files.clone());
        let mut more = files;
        more.insert("zz_noise.py".into(), vec!["unrelated"; filler_lines].join("\n"));
        let after = Index::from_files(more);
        for term in ["alpha", "beta", "gamma", "delta"] {
            let rank = |index: &Index| -> Vec<(String, usize)> {
                retrieve_with_budget(index, term, usize::MAX, usize::MAX)
                    .chunks
                    .into_iter()
                    .map(|c| (c.chunk.path, c.chunk.start_line))
                    .collect()
            };
            prop_assert_eq!(rank(&before), rank(&after));
        }
    }
}
