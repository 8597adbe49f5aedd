use std::collections::HashSet;

use serde_json::{Map, Value};

use super::{validate_fsm, Fsm, FsmDocument, FsmError, Outcome, StateLabel, StateNode, Transition};

/// Parses the JSON interchange form: a top-level array of machine objects.
///
/// Transitions may name their trigger with either `outcome` or the older
/// `condition` key. Unknown keys are ignored. Duplicate state names within a
/// machine are rejected here, at the first duplicate.
pub fn parse_fsm_json(text: &str) -> Result<FsmDocument, FsmError> {
    let value: Value = serde_json::from_str(text).map_err(|e| FsmError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    parse_fsm_value(&value)
}

/// Same as [`parse_fsm_json`] for an already decoded JSON value.
pub fn parse_fsm_value(value: &Value) -> Result<FsmDocument, FsmError> {
    let items = value.as_array().ok_or_else(|| FsmError::WrongType {
        path: "$".into(),
        expected: "an array of FSM objects",
    })?;
    let fsms = items
        .iter()
        .enumerate()
        .map(|(i, item)| parse_fsm(item, &format!("$[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FsmDocument { fsms })
}

fn parse_fsm(value: &Value, path: &str) -> Result<Fsm, FsmError> {
    let obj = object(value, path)?;
    let name = required_str(obj, "name", path)?;
    let description = optional_str(obj, "description", path)?;
    let initial_state = required_str(obj, "initialState", path)?;
    let states_value = obj.get("states").ok_or_else(|| FsmError::MissingKey {
        path: path.to_owned(),
        key: "states",
    })?;
    let states_path = format!("{path}.states");
    let raw_states = states_value.as_array().ok_or_else(|| FsmError::WrongType {
        path: states_path.clone(),
        expected: "an array",
    })?;

    let mut seen = HashSet::new();
    let mut states = Vec::with_capacity(raw_states.len());
    for (i, raw) in raw_states.iter().enumerate() {
        let state_path = format!("{states_path}[{i}]");
        let state = parse_state(raw, &state_path)?;
        if !seen.insert(state.name.as_str().to_owned()) {
            return Err(FsmError::DuplicateState {
                path: state_path,
                name: state.name.as_str().to_owned(),
            });
        }
        states.push(state);
    }

    Ok(Fsm {
        name,
        description,
        initial_state: StateLabel::new(initial_state),
        states,
    })
}

fn parse_state(value: &Value, path: &str) -> Result<StateNode, FsmError> {
    let obj = object(value, path)?;
    let name = required_str(obj, "name", path)?;
    let description = optional_str(obj, "description", path)?;
    let transitions = match obj.get("transitions") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, t)| parse_transition(t, &format!("{path}.transitions[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => {
            return Err(FsmError::WrongType {
                path: format!("{path}.transitions"),
                expected: "an array",
            })
        }
    };
    Ok(StateNode {
        name: StateLabel::new(name),
        description,
        transitions,
    })
}

fn parse_transition(value: &Value, path: &str) -> Result<Transition, FsmError> {
    let obj = object(value, path)?;
    let to = required_str(obj, "to", path)?;
    let outcome = match optional_str(obj, "outcome", path)? {
        Some(o) => o,
        None => optional_str(obj, "condition", path)?.ok_or_else(|| FsmError::MissingKey {
            path: path.to_owned(),
            key: "outcome",
        })?,
    };
    Ok(Transition {
        to: StateLabel::new(to),
        outcome: Outcome::new(outcome),
    })
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, FsmError> {
    value.as_object().ok_or_else(|| FsmError::WrongType {
        path: path.to_owned(),
        expected: "an object",
    })
}

fn required_str(obj: &Map<String, Value>, key: &'static str, path: &str) -> Result<String, FsmError> {
    optional_str(obj, key, path)?.ok_or_else(|| FsmError::MissingKey {
        path: path.to_owned(),
        key,
    })
}

fn optional_str(obj: &Map<String, Value>, key: &'static str, path: &str) -> Result<Option<String>, FsmError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(FsmError::WrongType {
            path: format!("{path}.{key}"),
            expected: "a string",
        }),
    }
}

/// Canonical output: two-space indentation, `outcome` keys, fixed field
/// order, trailing newline. Documents with validation errors are refused.
pub fn serialize_fsm_json(doc: &FsmDocument) -> Result<String, FsmError> {
    let report = validate_fsm(doc);
    if !report.valid {
        return Err(FsmError::Invalid {
            summary: report.error_summary(),
        });
    }
    let mut out = serde_json::to_string_pretty(doc).expect("FSM documents always serialize");
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::samples;
    use super::*;

    const SAMPLE_CONDITION: &str = r#"[
    {
        "name": "FSM1",
        "initialState": "State1",
        "states": [
            {
                "name": "State1",
                "transitions": [
                    { "to": "State2", "condition": "Event1" },
                    { "to": "State3", "condition": "Event2" }
                ]
            },
            { "name": "State2" },
            { "name": "State3" }
        ]
    }
]"#;

    #[test]
    fn sample_listing_parses() {
        let doc = parse_fsm_json(SAMPLE_CONDITION).unwrap();
        assert_eq!(doc.len(), 1);
        let fsm = &doc.fsms[0];
        assert_eq!(fsm.initial_state, "State1");
        assert_eq!(fsm.states.len(), 3);
        assert_eq!(fsm.states[0].transitions.len(), 2);
        assert_eq!(fsm.states[0].target("Event2").unwrap(), "State3");
    }

    #[test]
    fn empty_array_is_empty_document() {
        assert!(parse_fsm_json("[]").unwrap().is_empty());
    }

    #[test]
    fn condition_and_outcome_keys_agree() {
        let with_outcome = SAMPLE_CONDITION.replace("\"condition\"", "\"outcome\"");
        assert_eq!(parse_fsm_json(SAMPLE_CONDITION).unwrap(), parse_fsm_json(&with_outcome).unwrap());
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_fsm_json("[\n  {\"name\": }\n]").unwrap_err();
        match err {
            FsmError::Json { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_keys_name_key_and_path() {
        let cases = [
            (r#"[{"initialState": "A", "states": []}]"#, "name", "$[0]"),
            (r#"[{"name": "F", "states": []}]"#, "initialState", "$[0]"),
            (r#"[{"name": "F", "initialState": "A"}]"#, "states", "$[0]"),
            (
                r#"[{"name": "F", "initialState": "A", "states": [{"name": "A", "transitions": [{"outcome": "x"}]}]}]"#,
                "to",
                "$[0].states[0].transitions[0]",
            ),
            (r#"[{"name": "F", "initialState": "A", "states": [{"transitions": []}]}]"#, "name", "$[0].states[0]"),
        ];
        for (text, key, path) in cases {
            match parse_fsm_json(text).unwrap_err() {
                FsmError::MissingKey { path: p, key: k } => {
                    assert_eq!(k, key);
                    assert_eq!(p, path);
                }
                other => panic!("unexpected {other:?} for {text}"),
            }
        }
    }

    #[test]
    fn duplicate_state_names_rejected_at_first_duplicate() {
        let text = r#"[{"name": "F", "initialState": "A", "states": [
            {"name": "A"}, {"name": "B"}, {"name": "A"}, {"name": "B"}]}]"#;
        match parse_fsm_json(text).unwrap_err() {
            FsmError::DuplicateState { path, name } => {
                assert_eq!(name, "A");
                assert_eq!(path, "$[0].states[2]");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_types_are_schema_errors() {
        assert!(matches!(parse_fsm_json("{}"), Err(FsmError::WrongType { .. })));
        assert!(matches!(
            parse_fsm_json(r#"[{"name": 3, "initialState": "A", "states": []}]"#),
            Err(FsmError::WrongType { .. })
        ));
    }

    #[test]
    fn serialize_is_idempotent_on_sample() {
        let once = serialize_fsm_json(&parse_fsm_json(SAMPLE_CONDITION).unwrap()).unwrap();
        let twice = serialize_fsm_json(&parse_fsm_json(&once).unwrap()).unwrap();
        assert_eq!(once, twice);
        assert!(once.contains("\"outcome\": \"Event1\""));
        assert!(!once.contains("condition"));
    }

    #[test]
    fn one_state_golden_bytes() {
        let doc = FsmDocument::from(samples::single());
        let golden = include_str!("../../tests/golden/one_state.json");
        assert_eq!(serialize_fsm_json(&doc).unwrap(), golden);
    }

    #[test]
    fn two_fsms_keep_their_order() {
        let mut b = samples::ring3();
        b.name = "Zeta".into();
        let mut a = samples::single();
        a.name = "Alpha".into();
        let doc = FsmDocument::new(vec![b, a]);
        let back = parse_fsm_json(&serialize_fsm_json(&doc).unwrap()).unwrap();
        let names: Vec<&str> = back.fsms.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["Zeta", "Alpha"]);
    }

    #[test]
    fn invalid_document_refused() {
        let mut fsm = samples::navigation();
        fsm.states.retain(|s| s.name.as_str() != "Destination");
        let err = serialize_fsm_json(&fsm.into()).unwrap_err();
        match err {
            FsmError::Invalid { summary } => assert!(summary.contains("Destination")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
