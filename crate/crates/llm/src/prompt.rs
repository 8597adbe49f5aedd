//! Agent prompt templates, stored as data files and filled by name.
//!
//! A placeholder is `{name}` where `name` is an identifier. Anything else in
//! braces (the JSON schema block, for instance) is literal text. Substitution
//! is a single pass, so values containing braces are never expanded.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentName {
    Chatfsm,
    ExtractFsm,
    SummarizeChanges,
    SummarizeDiff,
    GetContext,
    FilterFsm,
}

impl AgentName {
    pub const ALL: [AgentName; 6] = [
        AgentName::Chatfsm,
        AgentName::ExtractFsm,
        AgentName::SummarizeChanges,
        AgentName::SummarizeDiff,
        AgentName::GetContext,
        AgentName::FilterFsm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentName::Chatfsm => "chatfsm",
            AgentName::ExtractFsm => "extract_fsm",
            AgentName::SummarizeChanges => "summarize_changes",
            AgentName::SummarizeDiff => "summarize_diff",
            AgentName::GetContext => "get_context",
            AgentName::FilterFsm => "filter_fsm",
        }
    }
}

impl fmt::Display for AgentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgentName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown agent `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("prompt `{template}` has no value for placeholder {{{name}}}")]
    Unfilled { template: &'static str, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentPrompt {
    pub agent: AgentName,
    pub name: &'static str,
    pub template: &'static str,
}

macro_rules! prompt {
    ($agent:expr, $file:literal) => {
        AgentPrompt {
            agent: $agent,
            name: $file,
            template: include_str!(concat!("../prompts/", $file, ".txt")),
        }
    };
}

pub const CHATFSM_SYSTEM: AgentPrompt = prompt!(AgentName::Chatfsm, "chatfsm_system");
pub const CHATFSM_INPUT: AgentPrompt = prompt!(AgentName::Chatfsm, "chatfsm_input");
pub const CONTEXT_WRAPPER: AgentPrompt = prompt!(AgentName::Chatfsm, "context_wrapper");
pub const EXTRACT_FSM: AgentPrompt = prompt!(AgentName::ExtractFsm, "extract_fsm");
pub const SUMMARIZE_CHANGES: AgentPrompt = prompt!(AgentName::SummarizeChanges, "summarize_changes");
pub const SUMMARIZE_DIFF: AgentPrompt = prompt!(AgentName::SummarizeDiff, "summarize_diff");
pub const GET_CONTEXT: AgentPrompt = prompt!(AgentName::GetContext, "get_context");
pub const FILTER_FSM: AgentPrompt = prompt!(AgentName::FilterFsm, "filter_fsm");

pub const ALL_PROMPTS: [AgentPrompt; 8] = [
    CHATFSM_SYSTEM,
    CHATFSM_INPUT,
    CONTEXT_WRAPPER,
    EXTRACT_FSM,
    SUMMARIZE_CHANGES,
    SUMMARIZE_DIFF,
    GET_CONTEXT,
    FILTER_FSM,
];

impl AgentPrompt {
    /// The template without its trailing newline.
    pub fn text(&self) -> &'static str {
        self.template.trim_end_matches('\n')
    }

    pub fn placeholders(&self) -> BTreeSet<&'static str> {
        scan(self.text()).filter_map(|p| p.placeholder()).collect()
    }

    pub fn render(&self, values: &[(&str, &str)]) -> Result<String, PromptError> {
        let mut out = String::with_capacity(self.text().len());
        for piece in scan(self.text()) {
            match piece {
                Piece::Text(t) => out.push_str(t),
                Piece::Placeholder(name) => {
                    let value = values
                        .iter()
                        .find(|(k, _)| *k == name)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| PromptError::Unfilled {
                            template: self.name,
                            name: name.to_owned(),
                        })?;
                    out.push_str(value);
                }
            }
        }
        Ok(out)
    }
}

enum Piece<'a> {
    Text(&'a str),
    Placeholder(&'a str),
}

impl<'a> Piece<'a> {
    fn placeholder(&self) -> Option<&'a str> {
        match self {
            Piece::Placeholder(p) => Some(p),
            Piece::Text(_) => None,
        }
    }
}

fn scan(template: &str) -> impl Iterator<Item = Piece<'_>> {
    let mut rest = template;
    std::iter::from_fn(move || {
        if rest.is_empty() {
            return None;
        }
        let mut search = 0;
        while let Some(open) = rest[search..].find('{').map(|i| i + search) {
            let after = &rest[open + 1..];
            let ident_len = after
                .char_indices()
                .take_while(|&(i, c)| c == '_' || c.is_ascii_alphabetic() || (i > 0 && c.is_ascii_digit()))
                .count();
            if ident_len > 0 && after[ident_len..].starts_with('}') {
                if open > 0 {
                    let text = &rest[..open];
                    rest = &rest[open..];
                    return Some(Piece::Text(text));
                }
                let name = &after[..ident_len];
                rest = &after[ident_len + 1..];
                return Some(Piece::Placeholder(name));
            }
            search = open + 1;
        }
        let text = rest;
        rest = "";
        Some(Piece::Text(text))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholders_per_template() {
        let names = |p: AgentPrompt| p.placeholders().into_iter().collect::<Vec<_>>();
        assert!(names(CHATFSM_SYSTEM).is_empty());
        assert_eq!(names(CHATFSM_INPUT), ["changes", "code"]);
        assert_eq!(names(CONTEXT_WRAPPER), ["context"]);
        assert!(names(EXTRACT_FSM).is_empty());
        assert_eq!(names(SUMMARIZE_CHANGES), ["file1", "file2", "messages"]);
        assert_eq!(names(SUMMARIZE_DIFF), ["file1", "file2", "messages"]);
        assert_eq!(names(GET_CONTEXT), ["input"]);
        assert_eq!(names(FILTER_FSM), ["code"]);
    }

    #[test]
    fn anchor_phrases_present() {
        let anchors = [
            (CHATFSM_SYSTEM, "Maintain the integrity and functionality of the FSM."),
            (CHATFSM_SYSTEM, "Finite State Machine (FSM) code follows the Requested Changes."),
            (CHATFSM_SYSTEM, "You are an advanced language model specialized in finite state machines"),
            (CONTEXT_WRAPPER, "Answer the user's questions based on the context below:"),
            (EXTRACT_FSM, "extract all finite state machines in the code and respond with JSON format"),
            (EXTRACT_FSM, "\"initialState\": \"State1\""),
            (SUMMARIZE_CHANGES, "analyze the changes in terms of finite state machines"),
            (SUMMARIZE_CHANGES, "Old File:{file1} New File:{file2}"),
            (SUMMARIZE_DIFF, "Ground truth:{file1} Input:{file2}"),
            (GET_CONTEXT, "generate a search query to look up"),
            (FILTER_FSM, "state declarations, the transitions between states, and the triggering events"),
        ];
        for (p, phrase) in anchors {
            assert!(p.text().contains(phrase), "{} lacks {phrase:?}", p.name);
        }
    }

    #[test]
    fn schema_braces_are_not_placeholders() {
        let text = EXTRACT_FSM.render(&[]).unwrap();
        assert_eq!(text, EXTRACT_FSM.text());
        assert!(text.contains("{\"to\": \"State2\", \"outcome\": \"Event1\"}"));
    }

    #[test]
    fn unfilled_placeholder_is_an_error() {
        let err = SUMMARIZE_DIFF.render(&[("file1", "a"), ("file2", "b")]).unwrap_err();
        assert_eq!(
            err,
            PromptError::Unfilled {
                template: "summarize_diff",
                name: "messages".into()
            }
        );
    }

    #[test]
    fn substitution_is_single_pass() {
        let out = CONTEXT_WRAPPER.render(&[("context", "{context} {x}")]).unwrap();
        assert_eq!(out, "Answer the user's questions based on the context below:\n\n{context} {x}");
    }

    #[test]
    fn rendering_is_deterministic() {
        let v = [("file1", "old"), ("file2", "new"), ("messages", "")];
        assert_eq!(SUMMARIZE_CHANGES.render(&v).unwrap(), SUMMARIZE_CHANGES.render(&v).unwrap());
    }

    #[test]
    fn agent_names_round_trip() {
        for a in AgentName::ALL {
            assert_eq!(a.as_str().parse::<AgentName>().unwrap(), a);
        }
    }
}
