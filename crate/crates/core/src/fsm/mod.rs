//! The state-machine model: a labeled directed graph whose vertices are
//! uniquely named states and whose edges carry the outcome that triggers
//! them.
//!
//! The outcome set of a state is not declared separately; it is exactly the
//! set of outcome labels on that state's transitions. A state with no
//! transitions is a sink.

mod json;
mod validate;

use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use json::{parse_fsm_json, parse_fsm_value, serialize_fsm_json};
pub use validate::{validate_fsm, Issue, IssueCode, Location, Severity, ValidationReport};

/// Errors raised while reading or writing the JSON interchange form.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FsmError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: missing required key `{key}`")]
    MissingKey { path: String, key: &'static str },
    #[error("schema error at {path}: expected {expected}")]
    WrongType {
        path: String,
        expected: &'static str,
    },
    #[error("duplicate state name `{name}` at {path}")]
    DuplicateState { path: String, name: String },
    #[error("refusing to serialize an invalid document: {summary}")]
    Invalid { summary: String },
}

macro_rules! label_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(value: impl Into<String>) -> Self {
                Self(value.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            /// True when the label is empty after trimming whitespace.
            pub fn is_blank(&self) -> bool {
                self.0.trim().is_empty()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(value: &str) -> Self {
                Self(value.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(value: String) -> Self {
                Self(value)
            }
        }

        impl PartialEq<str> for $name {
            fn eq(&self, other: &str) -> bool {
                self.0 == other
            }
        }

        impl PartialEq<&str> for $name {
            fn eq(&self, other: &&str) -> bool {
                self.0 == *other
            }
        }
    };
}

label_type!(
    /// Name of a state, unique within its machine.
    StateLabel
);
label_type!(
    /// Label of a transition trigger, unique among one state's transitions.
    Outcome
);

/// One entry of a state's transition table: on `outcome`, go to `to`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Transition {
    pub to: StateLabel,
    pub outcome: Outcome,
}

impl Transition {
    pub fn new(outcome: impl Into<Outcome>, to: impl Into<StateLabel>) -> Self {
        Self {
            to: to.into(),
            outcome: outcome.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateNode {
    pub name: StateLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub transitions: Vec<Transition>,
}

impl StateNode {
    pub fn new(name: impl Into<StateLabel>) -> Self {
        Self {
            name: name.into(),
            description: None,
            transitions: Vec::new(),
        }
    }

    pub fn with_transition(mut self, outcome: impl Into<Outcome>, to: impl Into<StateLabel>) -> Self {
        self.transitions.push(Transition::new(outcome, to));
        self
    }

    pub fn is_sink(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn target(&self, outcome: &str) -> Option<&StateLabel> {
        self.transitions
            .iter()
            .find(|t| t.outcome.as_str() == outcome)
            .map(|t| &t.to)
    }
}

/// A borrowed view of one edge of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge<'a> {
    pub from: &'a StateLabel,
    pub to: &'a StateLabel,
    pub outcome: &'a Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fsm {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(rename = "initialState")]
    pub initial_state: StateLabel,
    pub states: Vec<StateNode>,
}

impl Fsm {
    pub fn new(name: impl Into<String>, initial_state: impl Into<StateLabel>) -> Self {
        Self {
            name: name.into(),
            description: None,
            initial_state: initial_state.into(),
            states: Vec::new(),
        }
    }

    pub fn with_state(mut self, state: StateNode) -> Self {
        self.states.push(state);
        self
    }

    pub fn state(&self, name: &str) -> Option<&StateNode> {
        self.states.iter().find(|s| s.name.as_str() == name)
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.state(name).is_some()
    }

    /// All edges in declaration order (state order, then transition order).
    pub fn edges(&self) -> impl Iterator<Item = Edge<'_>> + '_ {
        self.states.iter().flat_map(|s| {
            s.transitions.iter().map(move |t| Edge {
                from: &s.name,
                to: &t.to,
                outcome: &t.outcome,
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.states.iter().map(|s| s.transitions.len()).sum()
    }
}

/// An ordered collection of machines; serializes as a bare JSON array.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FsmDocument {
    pub fsms: Vec<Fsm>,
}

impl FsmDocument {
    pub fn new(fsms: Vec<Fsm>) -> Self {
        Self { fsms }
    }

    pub fn fsm(&self, name: &str) -> Option<&Fsm> {
        self.fsms.iter().find(|f| f.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.fsms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.fsms.len()
    }
}

impl From<Fsm> for FsmDocument {
    fn from(fsm: Fsm) -> Self {
        Self { fsms: vec![fsm] }
    }
}

/// States with an empty transition list.
pub fn sink_states(fsm: &Fsm) -> BTreeSet<&StateLabel> {
    fsm.states
        .iter()
        .filter(|s| s.is_sink())
        .map(|s| &s.name)
        .collect()
}

#[cfg(test)]
pub(crate) mod samples {
    use super::*;

    /// The door-opening navigation task: five states, two self-loops.
    pub fn navigation() -> Fsm {
        Fsm::new("RobotNavigation", "Idle")
            .with_state(StateNode::new("Idle").with_transition("Start Command", "Navigate"))
            .with_state(
                StateNode::new("Navigate")
                    .with_transition("Reached Door", "Open Door")
                    .with_transition("Obstacle Detected", "Navigate"),
            )
            .with_state(
                StateNode::new("Open Door")
                    .with_transition("Door Opened", "Enter Room")
                    .with_transition("Failed to Open Door", "Open Door"),
            )
            .with_state(StateNode::new("Enter Room").with_transition("Room Entered", "Destination"))
            .with_state(StateNode::new("Destination"))
    }

    pub fn single() -> Fsm {
        Fsm::new("Single", "Only").with_state(StateNode::new("Only"))
    }

    pub fn ring3() -> Fsm {
        Fsm::new("Ring", "A")
            .with_state(StateNode::new("A").with_transition("next", "B"))
            .with_state(StateNode::new("B").with_transition("next", "C"))
            .with_state(StateNode::new("C").with_transition("next", "A"))
    }
}
