use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chatfsm_core::diff::{categorize, structural_diff, DiffCategory, DiffKind};
use chatfsm_core::fsm::{parse_fsm_json, FsmDocument};
use chatfsm_core::retrieval::{index_codebase, retrieve, wrap_context};
use chatfsm_eval::pipeline::{run_pairs, RunOptions};
use chatfsm_eval::script::{author, parent_code, CASSETTE_FILE, PAIRS_DIR, RERUNS_DIR};
use chatfsm_eval::{fixtures_dir, load_pairs, report, run_suite, EvalPair};
use chatfsm_llm::agents::modify_messages;
use chatfsm_llm::{
    request_digest, Cassette, CassetteMode, FailOnCallTransport, Gateway, LlmProviderConfig, EVAL_MODELS,
};
use regex::Regex;

fn pairs() -> Vec<EvalPair> {
    load_pairs(&fixtures_dir().join(PAIRS_DIR)).unwrap().0
}

fn extraction(name: &str) -> FsmDocument {
    let path = fixtures_dir().join("extractions").join(name);
    parse_fsm_json(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn replay_gateway(model: &str) -> (Gateway, Arc<FailOnCallTransport>) {
    let cassette = Cassette::open(&fixtures_dir().join(CASSETTE_FILE), CassetteMode::Replay).unwrap();
    let transport = Arc::new(FailOnCallTransport::default());
    let gw = Gateway::new(
        LlmProviderConfig::for_model(model),
        transport.clone(),
        Some(Arc::new(cassette)),
    )
    .unwrap();
    (gw, transport)
}

/// Edge triples read straight from the `StateMachine.add` calls.
fn smach_edges(source: &str) -> Vec<(String, String, String)> {
    let add = Regex::new(r#"(?s)StateMachine\.add\("(\w+)",.*?transitions=\{([^}]*)\}"#).unwrap();
    let pair = Regex::new(r#""(\w+)":\s*"(\w+)""#).unwrap();
    let mut edges = Vec::new();
    for call in add.captures_iter(source) {
        for t in pair.captures_iter(&call[2]) {
            edges.push((call[1].to_owned(), t[1].to_owned(), t[2].to_owned()));
        }
    }
    edges.sort();
    edges
}

fn doc_edges(doc: &FsmDocument) -> Vec<(String, String, String)> {
    let mut edges: Vec<_> = doc.fsms[0]
        .edges()
        .map(|e| (e.from.to_string(), e.outcome.to_string(), e.to.to_string()))
        .collect();
    edges.sort();
    edges
}

#[test]
fn extraction_answers_match_the_sources() {
    let first = Regex::new(r#"StateMachine\.add\("(\w+)""#).unwrap();
    for pair in pairs() {
        for (side, source) in [("parent", &pair.parent_source), ("child", &pair.child_source)] {
            let doc = extraction(&format!("{}_{side}.json", pair.pair_id));
            assert_eq!(doc_edges(&doc), smach_edges(source), "{} {side}", pair.pair_id);
            assert_eq!(doc.fsms[0].initial_state.as_str(), &first.captures(source).unwrap()[1]);
        }
        if let Some(gt) = &pair.ground_truth {
            assert_eq!(gt, &extraction(&format!("{}_child.json", pair.pair_id)));
        }
    }
    let reply = fs::read_to_string(fixtures_dir().join("script/pair3/reply.py")).unwrap();
    let doc = parse_fsm_json(&fs::read_to_string(fixtures_dir().join("script/pair3/reply.json")).unwrap()).unwrap();
    assert_eq!(doc_edges(&doc), smach_edges(&reply));
}

#[test]
fn pair_inventories() {
    // (StateAdded, StateRemoved, TransitionAdded, TransitionRemoved, OutcomeChanged)
    let expected = [
        ("pair1", (1, 1, 2, 2, 0)),
        ("pair2", (1, 5, 6, 10, 0)),
        ("pair3", (3, 1, 10, 5, 0)),
        ("pair4", (1, 0, 2, 0, 0)),
        ("pair5", (2, 0, 4, 0, 0)),
        ("pair6", (0, 2, 0, 3, 2)),
    ];
    for (id, counts) in expected {
        let items = structural_diff(
            &extraction(&format!("{id}_parent.json")),
            &extraction(&format!("{id}_child.json")),
        );
        let n = |k| items.iter().filter(|i| i.kind() == k).count();
        let got = (
            n(DiffKind::StateAdded),
            n(DiffKind::StateRemoved),
            n(DiffKind::TransitionAdded),
            n(DiffKind::TransitionRemoved),
            n(DiffKind::OutcomeChanged),
        );
        assert_eq!(got, counts, "{id}");
        assert_eq!(
            items.len(),
            counts.0 + counts.1 + counts.2 + counts.3 + counts.4,
            "{id} has no other kinds"
        );
    }
}

#[test]
fn pair5_messages() {
    let items = structural_diff(&extraction("pair5_parent.json"), &extraction("pair5_child.json"));
    let mut lines = chatfsm_core::render_messages(&items);
    lines.sort();
    let mut expected = vec![
        "State SAY_DETECT_HANDOVER added in HandoverToHuman.",
        "Transition from MOVE_HUMAN_HANDOVER_JOINT_GOAL to SAY_DETECT_HANDOVER added in HandoverToHuman.",
        "Transition from SAY_DETECT_HANDOVER to DETECT_HANDOVER added in HandoverToHuman.",
        "State SAY_CLOSE_NOW_GRIPPER added in HandoverToHuman.",
        "Transition from DETECT_HANDOVER to SAY_CLOSE_NOW_GRIPPER added in HandoverToHuman.",
        "Transition from SAY_CLOSE_NOW_GRIPPER to CLOSE_GRIPPER_HANDOVER added in HandoverToHuman.",
    ];
    expected.sort();
    assert_eq!(lines, expected);
}

#[test]
fn cassette_is_in_sync_with_scripts() {
    let authored = author(&fixtures_dir()).unwrap();
    let committed = fs::read_to_string(fixtures_dir().join(CASSETTE_FILE)).unwrap();
    assert!(
        authored.render() == committed,
        "cassette is stale; rerun `cargo run -p chatfsm-eval --bin author_cassette`"
    );
}

#[test]
fn rerun_is_pair3_with_the_class_file() {
    let rerun = load_pairs(&fixtures_dir().join(RERUNS_DIR)).unwrap().0;
    assert_eq!(rerun.len(), 1);
    let pair3 = pairs().into_iter().find(|p| p.pair_id == "pair3").unwrap();
    assert_eq!(rerun[0].parent_source, pair3.parent_source);
    assert_eq!(rerun[0].child_source, pair3.child_source);
    let class_file = Path::new("robot_smach_states/navigation/decide.py");
    assert!(rerun[0].codebase_dir.as_ref().unwrap().join(class_file).is_file());
    assert!(!pair3.codebase_dir.as_ref().unwrap().join(class_file).exists());
}

#[test]
fn pair3_replay_is_small_difference_without_context() {
    let (gw, transport) = replay_gateway(EVAL_MODELS[0]);
    let pair3: Vec<EvalPair> = pairs().into_iter().filter(|p| p.pair_id == "pair3").collect();
    let result = &run_pairs(&pair3, &gw, &RunOptions::default())[0];
    assert_eq!(result.category, Some(DiffCategory::SmallDifference));
    assert_eq!(
        result.diff_messages,
        ["Transition condition changed in state DECIDE_NAVIGATE_STATE: 'none' to 'not_found'."]
    );
    assert_eq!(transport.calls(), 0);
}

#[test]
fn context_retrieval_misses_then_finds_the_class() {
    let (gw, _) = replay_gateway(EVAL_MODELS[1]);
    let opts = RunOptions::with_context(true);
    let main = run_suite(&fixtures_dir().join(PAIRS_DIR), &gw, &opts).unwrap();
    let pair3 = main.results.iter().find(|r| r.pair_id == "pair3").unwrap();
    assert!(pair3.context_query.as_deref().unwrap().contains("_DecideNavigateState"));
    assert!(!pair3.context_chunks.is_empty());
    assert!(pair3.context_chunks.iter().all(|c| !c.contains("decide.py")));
    assert_eq!(pair3.category, Some(DiffCategory::SmallDifference));

    let rerun = run_suite(&fixtures_dir().join(RERUNS_DIR), &gw, &opts).unwrap();
    let result = &rerun.results[0];
    assert!(result.context_chunks[0].starts_with("robot_smach_states/navigation/decide.py:"));
    assert_eq!(result.category, Some(DiffCategory::NoDifference));
    assert!(result.diff_messages.is_empty());
}

#[test]
fn context_changes_only_the_context_message() {
    let (gw, _) = replay_gateway(EVAL_MODELS[0]);
    let dir = fixtures_dir().join(PAIRS_DIR);
    let off = run_suite(&dir, &gw, &RunOptions::default()).unwrap();
    let on = run_suite(&dir, &gw, &RunOptions::with_context(true)).unwrap();
    for ((pair, off), on) in pairs().iter().zip(&off.results).zip(&on.results) {
        let request = off.change_request.as_deref().unwrap();
        assert_eq!(on.change_request.as_deref(), Some(request));
        let code = parent_code(pair);
        let plain = modify_messages(&code, request, None).unwrap();
        assert_eq!(off.modify_digest.as_deref(), Some(request_digest(gw.model_id(), &plain).as_str()));

        let (index, _) = index_codebase(pair.codebase_dir.as_ref().unwrap()).unwrap();
        let context = wrap_context(&retrieve(&index, on.context_query.as_deref().unwrap(), 3));
        let with = modify_messages(&code, request, Some(&context)).unwrap();
        assert_eq!(on.modify_digest.as_deref(), Some(request_digest(gw.model_id(), &with).as_str()));
        let mut without = with.clone();
        without.remove(1);
        assert_eq!(without, plain);
    }
}

#[test]
fn replay_reports_are_byte_identical() {
    let run = || {
        let mut records = Vec::new();
        for model in EVAL_MODELS {
            let (gw, _) = replay_gateway(model);
            for with_context in [false, true] {
                records.push(run_suite(&fixtures_dir().join(PAIRS_DIR), &gw, &RunOptions::with_context(with_context)).unwrap());
            }
        }
        report(&records).to_json()
    };
    let first = run();
    assert_eq!(first, run());
    assert!(first.contains("\"source\": \"replay\""));
}

#[test]
fn missing_cassette_entry_fails_that_pair_only() {
    let dir = tempfile::tempdir().unwrap();
    let pairs_dir: PathBuf = dir.path().join("pairs");
    for id in ["pair4", "pair5"] {
        let src = fixtures_dir().join(PAIRS_DIR).join(id);
        let dst = pairs_dir.join(id);
        fs::create_dir_all(&dst).unwrap();
        for f in ["parent.py", "child.py"] {
            fs::copy(src.join(f), dst.join(f)).unwrap();
        }
    }
    fs::write(pairs_dir.join("pair5/request.txt"), "Something nobody recorded.\n").unwrap();
    let (gw, _) = replay_gateway(EVAL_MODELS[0]);
    let record = run_suite(&pairs_dir, &gw, &RunOptions::default()).unwrap();
    assert_eq!(record.results[0].category, Some(DiffCategory::NoDifference));
    let failure = record.results[1].failure.as_ref().unwrap();
    assert_eq!(failure.kind, "cassette_miss");
    assert_eq!(record.failed(), 1);
}

#[test]
fn deleting_a_state_is_a_difference() {
    let report = categorize(&extraction("pair5_child.json"), &extraction("pair5_parent.json"));
    assert_eq!(report.category, DiffCategory::Difference);
}
