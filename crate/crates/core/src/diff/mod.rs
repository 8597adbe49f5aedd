//! Label-driven comparison of two FSM documents.
//!
//! Machines are paired by name and states by label. Edges are matched on the
//! exact `(from, to, outcome)` triple first; leftover edges that share
//! `(from, to)` on both sides pair up as outcome changes, and whatever is
//! still unmatched becomes an added or removed transition. "Added" always
//! means present in the input but not in the ground truth.

mod renaming;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::fsm::{Fsm, FsmDocument};

pub use renaming::{apply_renaming, find_renaming, search_renaming, FsmRenaming, RenamingSearch, MAX_SEARCH_NODES, MAX_STATES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffKind {
    FsmAdded,
    FsmRemoved,
    StateAdded,
    StateRemoved,
    TransitionAdded,
    TransitionRemoved,
    OutcomeChanged,
    InitialStateChanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiffItem {
    FsmAdded {
        fsm: String,
    },
    FsmRemoved {
        fsm: String,
    },
    StateAdded {
        fsm: String,
        state: String,
    },
    StateRemoved {
        fsm: String,
        state: String,
    },
    TransitionAdded {
        fsm: String,
        from: String,
        to: String,
        outcome: String,
    },
    TransitionRemoved {
        fsm: String,
        from: String,
        to: String,
        outcome: String,
    },
    OutcomeChanged {
        fsm: String,
        from: String,
        to: String,
        old_outcome: String,
        new_outcome: String,
    },
    InitialStateChanged {
        fsm: String,
        old_state: String,
        new_state: String,
    },
}

impl DiffItem {
    pub fn kind(&self) -> DiffKind {
        match self {
            DiffItem::FsmAdded { .. } => DiffKind::FsmAdded,
            DiffItem::FsmRemoved { .. } => DiffKind::FsmRemoved,
            DiffItem::StateAdded { .. } => DiffKind::StateAdded,
            DiffItem::StateRemoved { .. } => DiffKind::StateRemoved,
            DiffItem::TransitionAdded { .. } => DiffKind::TransitionAdded,
            DiffItem::TransitionRemoved { .. } => DiffKind::TransitionRemoved,
            DiffItem::OutcomeChanged { .. } => DiffKind::OutcomeChanged,
            DiffItem::InitialStateChanged { .. } => DiffKind::InitialStateChanged,
        }
    }

    pub fn fsm(&self) -> &str {
        match self {
            DiffItem::FsmAdded { fsm }
            | DiffItem::FsmRemoved { fsm }
            | DiffItem::StateAdded { fsm, .. }
            | DiffItem::StateRemoved { fsm, .. }
            | DiffItem::TransitionAdded { fsm, .. }
            | DiffItem::TransitionRemoved { fsm, .. }
            | DiffItem::OutcomeChanged { fsm, .. }
            | DiffItem::InitialStateChanged { fsm, .. } => fsm,
        }
    }

    fn labels(&self) -> Vec<&str> {
        match self {
            DiffItem::FsmAdded { .. } | DiffItem::FsmRemoved { .. } => Vec::new(),
            DiffItem::StateAdded { state, .. } | DiffItem::StateRemoved { state, .. } => vec![state],
            DiffItem::TransitionAdded { from, to, outcome, .. }
            | DiffItem::TransitionRemoved { from, to, outcome, .. } => vec![from, to, outcome],
            DiffItem::OutcomeChanged {
                from,
                to,
                old_outcome,
                new_outcome,
                ..
            } => vec![from, to, old_outcome, new_outcome],
            DiffItem::InitialStateChanged { old_state, new_state, .. } => vec![old_state, new_state],
        }
    }

    fn sort_key(&self) -> (&str, DiffKind, Vec<&str>) {
        (self.fsm(), self.kind(), self.labels())
    }

    /// The item seen from the other side: added ↔ removed, old ↔ new.
    pub fn flipped(&self) -> DiffItem {
        match self.clone() {
            DiffItem::FsmAdded { fsm } => DiffItem::FsmRemoved { fsm },
            DiffItem::FsmRemoved { fsm } => DiffItem::FsmAdded { fsm },
            DiffItem::StateAdded { fsm, state } => DiffItem::StateRemoved { fsm, state },
            DiffItem::StateRemoved { fsm, state } => DiffItem::StateAdded { fsm, state },
            DiffItem::TransitionAdded { fsm, from, to, outcome } => DiffItem::TransitionRemoved { fsm, from, to, outcome },
            DiffItem::TransitionRemoved { fsm, from, to, outcome } => DiffItem::TransitionAdded { fsm, from, to, outcome },
            DiffItem::OutcomeChanged {
                fsm,
                from,
                to,
                old_outcome,
                new_outcome,
            } => DiffItem::OutcomeChanged {
                fsm,
                from,
                to,
                old_outcome: new_outcome,
                new_outcome: old_outcome,
            },
            DiffItem::InitialStateChanged { fsm, old_state, new_state } => DiffItem::InitialStateChanged {
                fsm,
                old_state: new_state,
                new_state: old_state,
            },
        }
    }

    /// One human-readable line in commit-message style.
    pub fn message(&self) -> String {
        match self {
            DiffItem::FsmAdded { fsm } => format!("FSM {fsm} added."),
            DiffItem::FsmRemoved { fsm } => format!("FSM {fsm} removed."),
            DiffItem::StateAdded { fsm, state } => format!("State {state} added in {fsm}."),
            DiffItem::StateRemoved { fsm, state } => format!("State {state} removed from {fsm}."),
            DiffItem::TransitionAdded { fsm, from, to, .. } => format!("Transition from {from} to {to} added in {fsm}."),
            DiffItem::TransitionRemoved { fsm, from, to, .. } => {
                format!("Transition from {from} to {to} removed from {fsm}.")
            }
            DiffItem::OutcomeChanged {
                from,
                old_outcome,
                new_outcome,
                ..
            } => format!("Transition condition changed in state {from}: '{old_outcome}' to '{new_outcome}'."),
            DiffItem::InitialStateChanged { fsm, old_state, new_state } => {
                format!("Initial state changed in {fsm}: '{old_state}' to '{new_state}'.")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffCategory {
    NoDifference,
    SmallDifference,
    Difference,
}

impl DiffCategory {
    pub const ALL: [DiffCategory; 3] = [
        DiffCategory::NoDifference,
        DiffCategory::SmallDifference,
        DiffCategory::Difference,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiffCategory::NoDifference => "no_difference",
            DiffCategory::SmallDifference => "small_difference",
            DiffCategory::Difference => "difference",
        }
    }
}

impl std::str::FromStr for DiffCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DiffCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown diff category `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    pub category: DiffCategory,
    pub items: Vec<DiffItem>,
    /// Per-machine renaming from input labels to ground-truth labels; present
    /// exactly when the category is `SmallDifference`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renaming: Option<BTreeMap<String, FsmRenaming>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DiffReport {
    pub fn messages(&self) -> Vec<String> {
        render_messages(&self.items)
    }

    pub fn count(&self, kind: DiffKind) -> usize {
        self.items.iter().filter(|i| i.kind() == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diff reports always serialize")
    }
}

pub fn structural_diff(ground_truth: &FsmDocument, input: &FsmDocument) -> Vec<DiffItem> {
    let mut items = Vec::new();
    for gt in &ground_truth.fsms {
        match input.fsm(&gt.name) {
            Some(inp) => diff_fsm(gt, inp, &mut items),
            None => items.push(DiffItem::FsmRemoved { fsm: gt.name.clone() }),
        }
    }
    for inp in &input.fsms {
        if ground_truth.fsm(&inp.name).is_none() {
            items.push(DiffItem::FsmAdded { fsm: inp.name.clone() });
        }
    }
    items.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    items.dedup();
    items
}

fn diff_fsm(gt: &Fsm, inp: &Fsm, items: &mut Vec<DiffItem>) {
    let fsm = || gt.name.clone();
    if gt.initial_state != inp.initial_state {
        items.push(DiffItem::InitialStateChanged {
            fsm: fsm(),
            old_state: gt.initial_state.to_string(),
            new_state: inp.initial_state.to_string(),
        });
    }

    let gt_states: BTreeSet<&str> = gt.states.iter().map(|s| s.name.as_str()).collect();
    let inp_states: BTreeSet<&str> = inp.states.iter().map(|s| s.name.as_str()).collect();
    for s in gt_states.difference(&inp_states) {
        items.push(DiffItem::StateRemoved {
            fsm: fsm(),
            state: s.to_string(),
        });
    }
    for s in inp_states.difference(&gt_states) {
        items.push(DiffItem::StateAdded {
            fsm: fsm(),
            state: s.to_string(),
        });
    }

    let gt_edges: BTreeSet<(&str, &str, &str)> = gt
        .edges()
        .map(|e| (e.from.as_str(), e.to.as_str(), e.outcome.as_str()))
        .collect();
    let inp_edges: BTreeSet<(&str, &str, &str)> = inp
        .edges()
        .map(|e| (e.from.as_str(), e.to.as_str(), e.outcome.as_str()))
        .collect();

    // Unmatched edges grouped by endpoints; outcomes kept sorted.
    let mut removed: BTreeMap<(&str, &str), Vec<&str>> = BTreeMap::new();
    for &(from, to, outcome) in gt_edges.difference(&inp_edges) {
        removed.entry((from, to)).or_default().push(outcome);
    }
    let mut added: BTreeMap<(&str, &str), Vec<&str>> = BTreeMap::new();
    for &(from, to, outcome) in inp_edges.difference(&gt_edges) {
        added.entry((from, to)).or_default().push(outcome);
    }

    for ((from, to), old) in &removed {
        let new = added.remove(&(*from, *to)).unwrap_or_default();
        let paired = old.len().min(new.len());
        for (o, n) in old.iter().zip(&new) {
            items.push(DiffItem::OutcomeChanged {
                fsm: fsm(),
                from: from.to_string(),
                to: to.to_string(),
                old_outcome: o.to_string(),
                new_outcome: n.to_string(),
            });
        }
        for o in &old[paired..] {
            items.push(DiffItem::TransitionRemoved {
                fsm: fsm(),
                from: from.to_string(),
                to: to.to_string(),
                outcome: o.to_string(),
            });
        }
        for n in &new[paired..] {
            items.push(DiffItem::TransitionAdded {
                fsm: fsm(),
                from: from.to_string(),
                to: to.to_string(),
                outcome: n.to_string(),
            });
        }
    }
    for ((from, to), new) in added {
        for n in new {
            items.push(DiffItem::TransitionAdded {
                fsm: fsm(),
                from: from.to_string(),
                to: to.to_string(),
                outcome: n.to_string(),
            });
        }
    }
}

/// Classifies the input against the ground truth.
///
/// Machines added, removed or with a moved initial state are always a
/// `Difference`. Otherwise the input is a `SmallDifference` when every
/// machine pair is label-identical up to a renaming of states and outcomes.
pub fn categorize(ground_truth: &FsmDocument, input: &FsmDocument) -> DiffReport {
    let items = structural_diff(ground_truth, input);
    if items.is_empty() {
        return DiffReport {
            category: DiffCategory::NoDifference,
            items,
            renaming: None,
            warnings: Vec::new(),
        };
    }

    let mut warnings = Vec::new();
    let forced = items.iter().any(|i| {
        matches!(
            i.kind(),
            DiffKind::FsmAdded | DiffKind::FsmRemoved | DiffKind::InitialStateChanged
        )
    });
    let mut renaming = None;
    if !forced {
        let mut maps = BTreeMap::new();
        let mut complete = true;
        for gt in &ground_truth.fsms {
            let Some(inp) = input.fsm(&gt.name) else {
                complete = false;
                break;
            };
            match search_renaming(gt, inp) {
                RenamingSearch::Found(map) => {
                    maps.insert(gt.name.clone(), map);
                }
                RenamingSearch::NotFound => {
                    complete = false;
                    break;
                }
                RenamingSearch::LimitExceeded => {
                    warnings.push(format!(
                        "renaming search for `{}` exceeded its limits ({} states, {} nodes); treated as structural difference",
                        gt.name, MAX_STATES, MAX_SEARCH_NODES
                    ));
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            renaming = Some(maps);
        }
    }

    let category = if renaming.is_some() {
        DiffCategory::SmallDifference
    } else {
        DiffCategory::Difference
    };
    DiffReport {
        category,
        items,
        renaming,
        warnings,
    }
}

pub fn render_messages(items: &[DiffItem]) -> Vec<String> {
    items.iter().map(DiffItem::message).collect()
}
