//! Core data model and deterministic algorithms for robot finite state
//! machines: the labeled-graph model and its JSON interchange form,
//! label-driven structural diffing with rename detection, extraction of
//! state-machine classes from source text, DOT emission, and lexical
//! retrieval over a codebase snapshot.

pub mod diff;
pub mod filter;
pub mod fsm;
pub mod retrieval;
pub mod viz;

pub use diff::{categorize, find_renaming, render_messages, structural_diff, DiffCategory, DiffItem, DiffKind, DiffReport};
pub use filter::{filter_fsm_regex, filtered_or_whole, CodeSpan};
pub use retrieval::{index_codebase, retrieve, wrap_context, ChunkRecord, ContextBundle, Index};
pub use fsm::{parse_fsm_json, serialize_fsm_json, sink_states, validate_fsm, Fsm, FsmDocument, FsmError, Outcome, StateLabel, StateNode, Transition, ValidationReport};
pub use viz::{diff_overlay, to_dot, DotOptions, RankDirection};
