use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{Fsm, FsmDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// Issue kinds. Declaration order is the tie-break order within one
/// location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueCode {
    EmptyFsmName,
    DuplicateFsmName,
    MissingInitialState,
    NoSinkStates,
    EmptyStateName,
    DuplicateStateName,
    EmptyOutcome,
    DuplicateOutcome,
    DanglingTarget,
}

impl IssueCode {
    pub fn severity(self) -> Severity {
        match self {
            IssueCode::NoSinkStates => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Location {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fsm: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("$")?;
        if let Some(i) = self.fsm {
            write!(f, "[{i}]")?;
        }
        if let Some(i) = self.state {
            write!(f, ".states[{i}]")?;
        }
        if let Some(i) = self.transition {
            write!(f, ".transitions[{i}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: IssueCode,
    pub message: String,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    /// One line per error, `location: message`.
    pub fn error_summary(&self) -> String {
        self.errors()
            .map(|i| format!("{}: {}", i.location, i.message))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Checks every model invariant and reports all violations.
///
/// Issues are ordered by machine index, then state index (machine-level
/// issues first), then issue code; transitions keep declaration order.
pub fn validate_fsm(doc: &FsmDocument) -> ValidationReport {
    let mut issues = Vec::new();
    let mut fsm_names = HashSet::new();
    for (fi, fsm) in doc.fsms.iter().enumerate() {
        let at = Location {
            fsm: Some(fi),
            ..Location::default()
        };
        if fsm.name.trim().is_empty() {
            push(&mut issues, IssueCode::EmptyFsmName, at, "FSM name is empty".into());
        } else if !fsm_names.insert(fsm.name.as_str()) {
            push(
                &mut issues,
                IssueCode::DuplicateFsmName,
                at,
                format!("FSM name `{}` is declared more than once", fsm.name),
            );
        }
        check_fsm(fsm, fi, &mut issues);
    }
    issues.sort_by(|a, b| {
        (a.location.fsm, a.location.state, a.code).cmp(&(b.location.fsm, b.location.state, b.code))
    });
    let valid = !issues.iter().any(|i| i.severity == Severity::Error);
    ValidationReport { valid, issues }
}

fn check_fsm(fsm: &Fsm, fi: usize, issues: &mut Vec<Issue>) {
    let at_fsm = Location {
        fsm: Some(fi),
        ..Location::default()
    };
    let declared: HashSet<&str> = fsm.states.iter().map(|s| s.name.as_str()).collect();

    if !declared.contains(fsm.initial_state.as_str()) {
        push(
            issues,
            IssueCode::MissingInitialState,
            at_fsm,
            format!("initial state `{}` of `{}` is not declared", fsm.initial_state, fsm.name),
        );
    }
    if !fsm.states.is_empty() && fsm.states.iter().all(|s| !s.is_sink()) {
        push(
            issues,
            IssueCode::NoSinkStates,
            at_fsm,
            format!("`{}` has no sink state; it never terminates", fsm.name),
        );
    }

    let mut seen_states = HashSet::new();
    for (si, state) in fsm.states.iter().enumerate() {
        let at_state = Location {
            state: Some(si),
            ..at_fsm
        };
        if state.name.is_blank() {
            push(issues, IssueCode::EmptyStateName, at_state, "state name is empty".into());
        } else if !seen_states.insert(state.name.as_str()) {
            push(
                issues,
                IssueCode::DuplicateStateName,
                at_state,
                format!("state `{}` is declared more than once", state.name),
            );
        }

        let mut seen_outcomes = HashSet::new();
        for (ti, t) in state.transitions.iter().enumerate() {
            let at = Location {
                transition: Some(ti),
                ..at_state
            };
            if t.outcome.as_str().is_empty() {
                push(
                    issues,
                    IssueCode::EmptyOutcome,
                    at,
                    format!("transition of `{}` has an empty outcome", state.name),
                );
            } else if !seen_outcomes.insert(t.outcome.as_str()) {
                push(
                    issues,
                    IssueCode::DuplicateOutcome,
                    at,
                    format!("outcome `{}` of `{}` maps to more than one target", t.outcome, state.name),
                );
            }
            if !declared.contains(t.to.as_str()) {
                push(
                    issues,
                    IssueCode::DanglingTarget,
                    at,
                    format!(
                        "transition `{}` of `{}` targets undeclared state `{}`",
                        t.outcome, state.name, t.to
                    ),
                );
            }
        }
    }
}

fn push(issues: &mut Vec<Issue>, code: IssueCode, location: Location, message: String) {
    issues.push(Issue {
        severity: code.severity(),
        code,
        message,
        location,
    });
}

#[cfg(test)]
mod tests {
    use super::super::samples::*;
    use super::super::{Fsm, StateNode};
    use super::*;

    fn codes(report: &ValidationReport) -> Vec<IssueCode> {
        report.issues.iter().map(|i| i.code).collect()
    }

    #[test]
    fn navigation_is_valid() {
        let report = validate_fsm(&navigation().into());
        assert!(report.valid);
        assert!(report.issues.is_empty());
    }

    #[test]
    fn one_state_initial_and_sink_is_valid() {
        let report = validate_fsm(&single().into());
        assert!(report.valid, "{report:?}");
    }

    #[test]
    fn dangling_target_reported_once() {
        let mut fsm = navigation();
        // Point an edge at a name that is not declared.
        fsm.states[3].transitions[0].to = "GHOST".into();
        let declared: HashSet<&str> = fsm.states.iter().map(|s| s.name.as_str()).collect();
        let dangling = fsm.edges().filter(|e| !declared.contains(e.to.as_str())).count();
        assert_eq!(dangling, 1);

        let report = validate_fsm(&fsm.into());
        assert!(!report.valid);
        assert_eq!(codes(&report), vec![IssueCode::DanglingTarget]);
        assert_eq!(report.issues[0].location.to_string(), "$[0].states[3].transitions[0]");
    }

    #[test]
    fn ring_without_sink_is_only_a_warning() {
        let report = validate_fsm(&ring3().into());
        assert!(report.valid);
        assert_eq!(codes(&report), vec![IssueCode::NoSinkStates]);
        assert_eq!(report.warnings().count(), 1);
    }

    #[test]
    fn duplicate_outcome_and_names() {
        let fsm = Fsm::new("F", "A")
            .with_state(StateNode::new("A").with_transition("go", "B").with_transition("go", "A"))
            .with_state(StateNode::new("B"))
            .with_state(StateNode::new("B"));
        let mut dup = single();
        dup.name = "F".into();
        let report = validate_fsm(&FsmDocument::new(vec![fsm, dup]));
        assert!(!report.valid);
        assert_eq!(
            codes(&report),
            vec![IssueCode::DuplicateOutcome, IssueCode::DuplicateStateName, IssueCode::DuplicateFsmName]
        );
    }

    #[test]
    fn ordering_is_fsm_then_state_then_code() {
        let bad = Fsm::new("", "Missing")
            .with_state(StateNode::new(" ").with_transition("", "Nowhere"))
            .with_state(StateNode::new("Z"));
        let report = validate_fsm(&FsmDocument::new(vec![ring3(), bad]));
        let got: Vec<(Option<usize>, Option<usize>, IssueCode)> = report
            .issues
            .iter()
            .map(|i| (i.location.fsm, i.location.state, i.code))
            .collect();
        assert_eq!(
            got,
            vec![
                (Some(0), None, IssueCode::NoSinkStates),
                (Some(1), None, IssueCode::EmptyFsmName),
                (Some(1), None, IssueCode::MissingInitialState),
                (Some(1), Some(0), IssueCode::EmptyStateName),
                (Some(1), Some(0), IssueCode::EmptyOutcome),
                (Some(1), Some(0), IssueCode::DanglingTarget),
            ]
        );
    }

    #[test]
    fn validation_is_pure_across_threads() {
        let doc: FsmDocument = navigation().into();
        let first = validate_fsm(&doc);
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let doc = doc.clone();
                std::thread::spawn(move || validate_fsm(&doc))
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), first);
        }
    }
}
