use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../eval/fixtures")
}

fn chatfsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chatfsm"))
        .args(args)
        .env("RUST_LOG", "off")
        .env_remove("CHATFSM_CASSETTE")
        .env_remove("CHATFSM_CASSETTE_MODE")
        .env_remove("CHATFSM_MODEL")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: PathBuf) -> String {
    p.to_str().unwrap().to_owned()
}

#[test]
fn eval_run_replays_and_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.json");
    let out = chatfsm(&[
        "eval",
        "run",
        &path(fixtures().join("pairs")),
        "--model",
        "gpt-4o-2024-05-13",
        "--model",
        "llama-3.1-70b-versatile",
        "--cassette",
        &path(fixtures().join("cassettes/eval.json")),
        "--out",
        &path(results.clone()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("ChatFSM Correctness\n"));
    assert!(text.contains("gpt-4o-2024-05-13 | 5 | 1 | 0\n"));
    assert!(text.contains("llama-3.1-70b-versatile | 5 | 1 | 0\n"));
    assert!(text.contains("Human | 164\n"));

    let report = chatfsm(&["eval", "report", &path(results)]);
    assert!(report.status.success());
    assert_eq!(stdout(&report), text);
}

#[test]
fn eval_run_fails_when_a_pair_fails() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pairs/pair5");
    fs::create_dir_all(&pair).unwrap();
    for f in ["parent.py", "child.py"] {
        fs::copy(fixtures().join("pairs/pair5").join(f), pair.join(f)).unwrap();
    }
    fs::write(pair.join("request.txt"), "Something nobody recorded.\n").unwrap();
    let out = chatfsm(&[
        "eval",
        "run",
        &path(dir.path().join("pairs")),
        "--model",
        "gpt-4o-2024-05-13",
        "--cassette",
        &path(fixtures().join("cassettes/eval.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("failed runs for gpt-4o-2024-05-13: 1\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cassette_miss"));
}

#[test]
fn diff_prints_category_and_messages() {
    let out = chatfsm(&[
        "diff",
        &path(fixtures().join("extractions/pair3_child.json")),
        &path(fixtures().join("script/pair3/reply.json")),
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "small_difference\nTransition condition changed in state DECIDE_NAVIGATE_STATE: 'none' to 'not_found'.\n"
    );
}

#[test]
fn viz_emits_overlay() {
    let out = chatfsm(&[
        "viz",
        &path(fixtures().join("extractions/pair5_child.json")),
        "--diff",
        &path(fixtures().join("extractions/pair5_parent.json")),
        "--rankdir",
        "TB",
    ]);
    assert!(out.status.success());
    let dot = stdout(&out);
    assert!(dot.contains("rankdir=TB;"));
    assert_eq!(dot.matches("style=dashed").count(), 2 + 4);
}

#[test]
fn validate_reports_errors_with_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"[{"name": "M", "initialState": "A", "states": [{"name": "A", "transitions": [{"to": "B", "outcome": "done"}]}]}]"#,
    )
    .unwrap();
    let out = chatfsm(&["validate", &path(bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\nerror: $[0].states[0].transitions[0]: "));

    let good = chatfsm(&["validate", &path(fixtures().join("extractions/pair1_parent.json"))]);
    assert!(good.status.success());
    assert!(stdout(&good).ends_with("valid\n"));
}

#[test]
fn extract_replays_the_parent() {
    let out = chatfsm(&[
        "extract",
        &path(fixtures().join("pairs/pair5/parent.py")),
        "--cassette",
        &path(fixtures().join("cassettes/eval.json")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        stdout(&out),
        fs::read_to_string(fixtures().join("extractions/pair5_parent.json")).unwrap()
    );
}

#[test]
fn context_index_then_query() {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("index.json");
    let codebase = fixtures().join("reruns/pair3_manual_context/codebase");
    assert!(chatfsm(&["context", "index", &path(codebase), "-o", &path(index.clone())]).status.success());
    let out = chatfsm(&["context", "query", &path(index), "_DecideNavigateState", "-k", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    assert!(first.ends_with("robot_smach_states/navigation/decide.py:1-22"), "{text}");
    assert!(text.lines().count() <= 2);
}

#[test]
fn missing_cassette_in_replay_mode_is_an_error() {
    let out = chatfsm(&["extract", &path(fixtures().join("pairs/pair5/parent.py"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cassette is required"));
}
