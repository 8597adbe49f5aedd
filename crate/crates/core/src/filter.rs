//! Regex isolation of state-machine classes in robot source files.
//!
//! The pattern is
//!
//! ```text
//! class\s+\w+\(smach\.StateMachine\):\s*(?:""".*?"""\s*)?\s*def\s+__init__.*?(?=\nclass|\nif\s+__name__|$)
//! ```
//!
//! with dot matching newlines. The `regex` crate has no lookahead, so the
//! match is split in two: the head up to `__init__` runs through the engine,
//! and the lazy tail is resolved by scanning for the earliest terminator.
//! Since the tail can always reach end of input, the head that a backtracking
//! engine would settle on is the leftmost-first head match, so the split is
//! exact. `$` means end of input here.

use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

static HEAD: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?s)class\s+\w+\(smach\.StateMachine\):\s*(?:""".*?"""\s*)?\s*def\s+__init__"#)
        .expect("head pattern compiles")
});

static GUARD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\A\nif\s+__name__").expect("guard pattern compiles"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CodeSpan {
    pub path: PathBuf,
    pub start_byte: usize,
    pub end_byte: usize,
    pub text: String,
}

/// Every non-overlapping match in source order. No match is not an error.
pub fn filter_fsm_regex(source: &str, path: &Path) -> Vec<CodeSpan> {
    let mut spans = Vec::new();
    let mut from = 0;
    while let Some(head) = HEAD.find_at(source, from) {
        let end = terminator(source, head.end());
        spans.push(CodeSpan {
            path: path.to_path_buf(),
            start_byte: head.start(),
            end_byte: end,
            text: source[head.start()..end].to_owned(),
        });
        from = end;
    }
    spans
}

/// Concatenated span texts separated by blank lines; the whole source when
/// nothing matches.
pub fn filtered_or_whole(source: &str, path: &Path) -> String {
    let spans = filter_fsm_regex(source, path);
    if spans.is_empty() {
        return source.to_owned();
    }
    spans.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join("\n\n")
}

fn terminator(source: &str, from: usize) -> usize {
    let bytes = source.as_bytes();
    let mut at = from;
    while let Some(offset) = memchr_newline(&bytes[at..]) {
        let p = at + offset;
        let rest = &source[p..];
        if rest.starts_with("\nclass") || GUARD.is_match(rest) {
            return p;
        }
        at = p + 1;
    }
    source.len()
}

fn memchr_newline(bytes: &[u8]) -> Option<usize> {
    bytes.iter().position(|&b| b == b'\n')
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Byte offsets frozen from Python's `re` with the same pattern, `$`
    /// replaced by `\Z`.
    const TABLE: &[(&str, &[(usize, usize)])] = &[
        ("01_docstring_to_eof.py", &[(77, 533)]),
        ("02_no_fsm.py", &[]),
        ("03_two_then_guard.py", &[(51, 417), (418, 673)]),
        ("04_no_docstring.py", &[(15, 334)]),
        ("05_other_base_first.py", &[(205, 500)]),
        ("06_nested_class.py", &[(15, 386)]),
        ("07_guard_extra_spaces.py", &[(15, 251)]),
        ("08_no_init.py", &[(106, 231)]),
        ("09_unicode.py", &[(39, 326), (327, 453)]),
        ("10_indented_class_word.py", &[(15, 360)]),
    ];

    fn fixture(name: &str) -> String {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/filter").join(name);
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
    }

    #[test]
    fn fixture_table() {
        for (name, expected) in TABLE {
            let source = fixture(name);
            let spans = filter_fsm_regex(&source, Path::new(name));
            let got: Vec<(usize, usize)> = spans.iter().map(|s| (s.start_byte, s.end_byte)).collect();
            assert_eq!(&got, expected, "{name}");
            for s in &spans {
                assert_eq!(s.text, source[s.start_byte..s.end_byte]);
                assert!(s.text.starts_with("class "), "{name}");
            }
        }
    }

    #[test]
    fn empty_and_plain_sources() {
        assert!(filter_fsm_regex("", Path::new("x.py")).is_empty());
        assert!(filter_fsm_regex("import smach\n", Path::new("x.py")).is_empty());
        assert_eq!(filtered_or_whole("x = 1\n", Path::new("x.py")), "x = 1\n");
    }

    #[test]
    fn deterministic() {
        let source = fixture("03_two_then_guard.py");
        assert_eq!(
            filter_fsm_regex(&source, Path::new("a")),
            filter_fsm_regex(&source, Path::new("a"))
        );
    }
}
