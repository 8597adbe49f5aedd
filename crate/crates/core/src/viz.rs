//! DOT emission for state machines, with optional diff styling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diff::{structural_diff, DiffItem, DiffReport};
use crate::fsm::{validate_fsm, Fsm, FsmDocument};

const START_NODE: &str = "__start__";

const ADDED: &str = r#"style=dashed, class="added""#;
const REMOVED: &str = r#"style=dotted, color=gray, fontcolor=gray, class="removed""#;
const CHANGED: &str = r#"class="changed""#;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RankDirection {
    #[default]
    LeftRight,
    TopBottom,
}

impl RankDirection {
    fn dot(self) -> &'static str {
        match self {
            RankDirection::LeftRight => "LR",
            RankDirection::TopBottom => "TB",
        }
    }
}

impl FromStr for RankDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "LR" | "lr" | "leftRight" | "left-right" => Ok(RankDirection::LeftRight),
            "TB" | "tb" | "topBottom" | "top-bottom" => Ok(RankDirection::TopBottom),
            other => Err(format!("unknown rank direction `{other}` (expected LR or TB)")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct DotOptions {
    pub rank_direction: RankDirection,
    /// Styles the listed changes. Removed elements need the ground truth to
    /// be drawn, so only [`diff_overlay`] ghosts whole removed machines.
    pub highlight_diff: Option<DiffReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VizError {
    #[error("refusing to render an invalid document: {0}")]
    Invalid(String),
}

/// One digraph per machine, nodes and edges in lexicographic order.
pub fn to_dot(doc: &FsmDocument, opts: &DotOptions) -> Result<String, VizError> {
    let report = validate_fsm(doc);
    if !report.valid {
        return Err(VizError::Invalid(report.error_summary()));
    }
    let items = opts.highlight_diff.as_ref().map(|r| r.items.as_slice()).unwrap_or(&[]);
    Ok(render(doc, items, None, opts.rank_direction))
}

/// The input document drawn with the changes against the ground truth:
/// additions dashed, removals ghosted, relabeled edges marked as changed.
/// With no differences this is exactly [`to_dot`] output.
pub fn diff_overlay(ground_truth: &FsmDocument, input: &FsmDocument, rank_direction: RankDirection) -> String {
    let items = structural_diff(ground_truth, input);
    render(input, &items, Some(ground_truth), rank_direction)
}

#[derive(Default)]
struct Graph {
    nodes: BTreeMap<String, (bool, Option<&'static str>)>,
    edges: BTreeSet<(String, String, String, Option<&'static str>)>,
}

fn render(doc: &FsmDocument, items: &[DiffItem], gt: Option<&FsmDocument>, rankdir: RankDirection) -> String {
    let mut blocks = Vec::new();
    for fsm in &doc.fsms {
        let mine: Vec<&DiffItem> = items.iter().filter(|i| i.fsm() == fsm.name).collect();
        blocks.push(render_fsm(fsm, &mine, gt.and_then(|g| g.fsm(&fsm.name)), rankdir, None));
    }
    if let Some(gt) = gt {
        for item in items {
            if let DiffItem::FsmRemoved { fsm } = item {
                if let Some(ghost) = gt.fsm(fsm) {
                    blocks.push(render_fsm(ghost, &[], None, rankdir, Some(REMOVED)));
                }
            }
        }
    }
    blocks.join("\n")
}

fn render_fsm(
    fsm: &Fsm,
    items: &[&DiffItem],
    gt: Option<&Fsm>,
    rankdir: RankDirection,
    whole: Option<&'static str>,
) -> String {
    let mut g = Graph::default();
    let whole = whole.or_else(|| {
        items
            .iter()
            .any(|i| matches!(i, DiffItem::FsmAdded { .. }))
            .then_some(ADDED)
    });
    let added_states: BTreeSet<&str> = items
        .iter()
        .filter_map(|i| match i {
            DiffItem::StateAdded { state, .. } => Some(state.as_str()),
            _ => None,
        })
        .collect();
    let mut added_edges = BTreeSet::new();
    let mut changed_edges = BTreeMap::new();
    for item in items {
        match item {
            DiffItem::TransitionAdded { from, to, outcome, .. } => {
                added_edges.insert((from.as_str(), to.as_str(), outcome.as_str()));
            }
            DiffItem::OutcomeChanged {
                from,
                to,
                old_outcome,
                new_outcome,
                ..
            } => {
                changed_edges.insert((from.as_str(), to.as_str(), new_outcome.as_str()), old_outcome.as_str());
            }
            _ => {}
        }
    }

    for s in &fsm.states {
        let class = whole.or(added_states.contains(s.name.as_str()).then_some(ADDED));
        g.nodes.insert(s.name.to_string(), (s.is_sink(), class));
        for t in &s.transitions {
            let key = (s.name.as_str(), t.to.as_str(), t.outcome.as_str());
            let (label, class) = if let Some(old) = changed_edges.get(&key) {
                (format!("{} (was {old})", t.outcome), Some(CHANGED))
            } else {
                (t.outcome.to_string(), whole.or(added_edges.contains(&key).then_some(ADDED)))
            };
            g.edges.insert((s.name.to_string(), t.to.to_string(), label, class));
        }
    }

    for item in items {
        match item {
            DiffItem::StateRemoved { state, .. } => {
                let sink = gt.and_then(|f| f.state(state)).is_some_and(|s| s.is_sink());
                g.nodes.insert(state.clone(), (sink, Some(REMOVED)));
            }
            DiffItem::TransitionRemoved { from, to, outcome, .. } => {
                g.edges.insert((from.clone(), to.clone(), outcome.clone(), Some(REMOVED)));
            }
            _ => {}
        }
    }

    let mut start = START_NODE.to_owned();
    while g.nodes.contains_key(&start) {
        start.push('_');
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&fsm.name));
    let _ = writeln!(out, "  rankdir={};", rankdir.dot());
    let _ = writeln!(out, "  {} [shape=point];", quote(&start));
    for (name, (sink, class)) in &g.nodes {
        let shape = if *sink { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {} [{}];", quote(name), attrs(&format!("shape={shape}"), *class));
    }
    let _ = writeln!(out, "  {} -> {};", quote(&start), quote(fsm.initial_state.as_str()));
    for (from, to, label, class) in &g.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [{}];",
            quote(from),
            quote(to),
            attrs(&format!("label={}", quote(label)), *class)
        );
    }
    out.push_str("}\n");
    out
}

fn attrs(first: &str, class: Option<&str>) -> String {
    match class {
        Some(c) => format!("{first}, {c}"),
        None => first.to_owned(),
    }
}

/// Always quoted; quotes and backslashes escaped.
pub fn quote(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for c in id.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// A minimal reader for the DOT subset this module writes, used to check
/// that output is well formed without an external renderer.
pub mod syntax {
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum Token {
        Id(String),
        LBrace,
        RBrace,
        LBracket,
        RBracket,
        Semi,
        Comma,
        Equals,
        Arrow,
    }

    pub type Attrs = Vec<(String, String)>;

    #[derive(Debug, Clone, Default, PartialEq, Eq)]
    pub struct Graph {
        pub name: Option<String>,
        pub nodes: Vec<(String, Attrs)>,
        pub edges: Vec<(String, String, Attrs)>,
    }

    impl Graph {
        pub fn node_attr(&self, node: usize, key: &str) -> Option<&str> {
            lookup(&self.nodes[node].1, key)
        }

        pub fn edge_attr(&self, edge: usize, key: &str) -> Option<&str> {
            lookup(&self.edges[edge].2, key)
        }
    }

    fn lookup<'a>(attrs: &'a [(String, String)], key: &str) -> Option<&'a str> {
        attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn tokenize(text: &str) -> Result<Vec<Token>, String> {
        let mut out = Vec::new();
        let mut chars = text.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            match c {
                c if c.is_whitespace() => {}
                '{' => out.push(Token::LBrace),
                '}' => out.push(Token::RBrace),
                '[' => out.push(Token::LBracket),
                ']' => out.push(Token::RBracket),
                ';' => out.push(Token::Semi),
                ',' => out.push(Token::Comma),
                '=' => out.push(Token::Equals),
                '-' if chars.peek().map(|&(_, n)| n) == Some('>') => {
                    chars.next();
                    out.push(Token::Arrow);
                }
                '"' => {
                    let mut s = String::new();
                    loop {
                        match chars.next() {
                            Some((_, '\\')) => match chars.next() {
                                Some((_, e @ ('"' | '\\'))) => s.push(e),
                                Some((_, e)) => {
                                    s.push('\\');
                                    s.push(e);
                                }
                                None => return Err(format!("unterminated string at byte {i}")),
                            },
                            Some((_, '"')) => break,
                            Some((_, ch)) => s.push(ch),
                            None => return Err(format!("unterminated string at byte {i}")),
                        }
                    }
                    out.push(Token::Id(s));
                }
                c if c.is_alphanumeric() || c == '_' || c == '.' => {
                    let mut s = String::from(c);
                    while let Some(&(_, n)) = chars.peek() {
                        if n.is_alphanumeric() || n == '_' || n == '.' {
                            s.push(n);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push(Token::Id(s));
                }
                other => return Err(format!("unexpected `{other}` at byte {i}")),
            }
        }
        Ok(out)
    }

    /// Parses a sequence of `digraph` blocks.
    pub fn parse(text: &str) -> Result<Vec<Graph>, String> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let mut graphs = Vec::new();
        while p.pos < p.tokens.len() {
            graphs.push(p.graph()?);
        }
        Ok(graphs)
    }

    struct Parser {
        tokens: Vec<Token>,
        pos: usize,
    }

    impl Parser {
        fn peek(&self) -> Option<&Token> {
            self.tokens.get(self.pos)
        }

        fn next(&mut self) -> Option<Token> {
            let t = self.tokens.get(self.pos).cloned();
            self.pos += 1;
            t
        }

        fn expect(&mut self, want: Token) -> Result<(), String> {
            match self.next() {
                Some(t) if t == want => Ok(()),
                other => Err(format!("expected {want:?}, found {other:?}")),
            }
        }

        fn id(&mut self) -> Result<String, String> {
            match self.next() {
                Some(Token::Id(s)) => Ok(s),
                other => Err(format!("expected identifier, found {other:?}")),
            }
        }

        fn graph(&mut self) -> Result<Graph, String> {
            match self.id()?.as_str() {
                "digraph" => {}
                other => return Err(format!("expected `digraph`, found `{other}`")),
            }
            let mut g = Graph::default();
            if let Some(Token::Id(_)) = self.peek() {
                g.name = Some(self.id()?);
            }
            self.expect(Token::LBrace)?;
            loop {
                match self.peek() {
                    Some(Token::RBrace) => {
                        self.pos += 1;
                        return Ok(g);
                    }
                    Some(Token::Semi) => self.pos += 1,
                    Some(Token::Id(_)) => self.statement(&mut g)?,
                    other => return Err(format!("unexpected {other:?} in graph body")),
                }
            }
        }

        fn statement(&mut self, g: &mut Graph) -> Result<(), String> {
            let first = self.id()?;
            match self.peek() {
                Some(Token::Equals) => {
                    self.pos += 1;
                    self.id()?;
                }
                Some(Token::Arrow) => {
                    self.pos += 1;
                    let to = self.id()?;
                    let attrs = self.attrs()?;
                    g.edges.push((first, to, attrs));
                }
                _ => {
                    let attrs = self.attrs()?;
                    g.nodes.push((first, attrs));
                }
            }
            Ok(())
        }

        fn attrs(&mut self) -> Result<Vec<(String, String)>, String> {
            let mut out = Vec::new();
            if self.peek() != Some(&Token::LBracket) {
                return Ok(out);
            }
            self.pos += 1;
            loop {
                match self.peek() {
                    Some(Token::RBracket) => {
                        self.pos += 1;
                        return Ok(out);
                    }
                    Some(Token::Comma) => self.pos += 1,
                    _ => {
                        let k = self.id()?;
                        self.expect(Token::Equals)?;
                        let v = self.id()?;
                        out.push((k, v));
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::samples::{navigation, single};
    use crate::fsm::StateNode;

    fn figure_machine() -> Fsm {
        Fsm::new("Model", "S_I")
            .with_state(StateNode::new("S_I").with_transition("O_SI_0", "S_1"))
            .with_state(
                StateNode::new("S_1")
                    .with_transition("O_S1_0", "S_2")
                    .with_transition("O_S1_1", "S_1"),
            )
            .with_state(
                StateNode::new("S_2")
                    .with_transition("O_S2_0", "S_X_0")
                    .with_transition("O_S2_1", "S_1"),
            )
            .with_state(StateNode::new("S_X_0"))
    }

    fn parsed(text: &str) -> syntax::Graph {
        let mut graphs = syntax::parse(text).unwrap();
        assert_eq!(graphs.len(), 1);
        graphs.remove(0)
    }

    #[test]
    fn figure_shape_counts() {
        let text = to_dot(&figure_machine().into(), &DotOptions::default()).unwrap();
        let g = parsed(&text);
        assert_eq!(g.nodes.len(), 5);
        assert_eq!(g.edges.len(), 6);
        assert_eq!(g.edges.iter().filter(|e| e.2.is_empty()).count(), 1);
        let sink = g.nodes.iter().position(|n| n.0 == "S_X_0").unwrap();
        assert_eq!(g.node_attr(sink, "shape"), Some("doublecircle"));
    }

    #[test]
    fn single_state_golden() {
        let text = to_dot(&single().into(), &DotOptions::default()).unwrap();
        assert_eq!(
            text,
            "digraph \"Single\" {\n  rankdir=LR;\n  \"__start__\" [shape=point];\n  \"Only\" [shape=doublecircle];\n  \"__start__\" -> \"Only\";\n}\n"
        );
    }

    #[test]
    fn deterministic_bytes() {
        let doc: FsmDocument = navigation().into();
        let opts = DotOptions::default();
        assert_eq!(to_dot(&doc, &opts).unwrap(), to_dot(&doc, &opts).unwrap());
    }

    #[test]
    fn top_bottom_direction() {
        let opts = DotOptions {
            rank_direction: RankDirection::TopBottom,
            ..DotOptions::default()
        };
        assert!(to_dot(&single().into(), &opts).unwrap().contains("rankdir=TB;"));
    }

    #[test]
    fn start_node_avoids_state_collision() {
        let fsm = Fsm::new("F", "__start__").with_state(StateNode::new("__start__"));
        let g = parsed(&to_dot(&fsm.into(), &DotOptions::default()).unwrap());
        assert_eq!(g.nodes[0].0, "__start___");
        assert_eq!(g.edges[0].0, "__start___");
        assert_eq!(g.edges[0].1, "__start__");
    }

    #[test]
    fn awkward_labels_round_trip() {
        let label = r#"say "hi" \ wave"#;
        let fsm = Fsm::new("Q\"uote", label)
            .with_state(StateNode::new(label).with_transition("a \"b\"", "end\\"))
            .with_state(StateNode::new("end\\"));
        let g = parsed(&to_dot(&fsm.into(), &DotOptions::default()).unwrap());
        assert_eq!(g.name.as_deref(), Some("Q\"uote"));
        let names: BTreeSet<&str> = g.nodes.iter().map(|n| n.0.as_str()).collect();
        assert!(names.contains(label) && names.contains("end\\"));
        let labeled = g.edges.iter().position(|e| !e.2.is_empty()).unwrap();
        assert_eq!(g.edge_attr(labeled, "label"), Some("a \"b\""));
    }

    #[test]
    fn invalid_document_refused() {
        let fsm = Fsm::new("F", "Nowhere").with_state(StateNode::new("A"));
        assert!(matches!(to_dot(&fsm.into(), &DotOptions::default()), Err(VizError::Invalid(_))));
    }

    #[test]
    fn overlay_without_changes_is_plain_output() {
        let doc: FsmDocument = navigation().into();
        assert_eq!(
            diff_overlay(&doc, &doc, RankDirection::LeftRight),
            to_dot(&doc, &DotOptions::default()).unwrap()
        );
    }

    #[test]
    fn overlay_marks_added_removed_and_changed() {
        let gt = navigation();
        let mut input = gt.clone();
        input.states.retain(|s| s.name != "Enter Room");
        input.states[2].transitions[0].to = "Destination".into();
        input.states[1].transitions[1].outcome = "Blocked".into();
        input.states.push(StateNode::new("Report"));
        input.states[0].transitions.push(crate::fsm::Transition::new("Status", "Report"));

        let text = diff_overlay(&gt.into(), &input.into(), RankDirection::LeftRight);
        let g = parsed(&text);
        let with_class = |c: &str| {
            let nodes = (0..g.nodes.len()).filter(|&i| g.node_attr(i, "class") == Some(c)).count();
            let edges = (0..g.edges.len()).filter(|&i| g.edge_attr(i, "class") == Some(c)).count();
            (nodes, edges)
        };
        assert_eq!(with_class("added"), (1, 2));
        // Enter Room ghosted with its incoming and outgoing edge.
        assert_eq!(with_class("removed"), (1, 2));
        assert_eq!(with_class("changed"), (0, 1));
        assert!(text.contains("label=\"Blocked (was Obstacle Detected)\""));
    }

    #[test]
    fn removed_machine_is_ghosted() {
        let gt = FsmDocument::new(vec![navigation(), single()]);
        let input: FsmDocument = navigation().into();
        let g = syntax::parse(&diff_overlay(&gt, &input, RankDirection::LeftRight)).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].name.as_deref(), Some("Single"));
        assert_eq!(g[1].node_attr(1, "class"), Some("removed"));
    }

    #[test]
    fn tokenizer_rejects_garbage() {
        assert!(syntax::parse("digraph { \"a\" -> }").is_err());
        assert!(syntax::parse("digraph { \"unterminated }").is_err());
        assert!(syntax::tokenize("@").is_err());
    }
}
