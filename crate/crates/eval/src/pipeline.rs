//! One evaluation run over a parent/child pair: filter, request, optional
//! context, modification, extraction, ground truth and diff.

use std::fmt;
use std::time::Instant;

use chatfsm_core::diff::{categorize, DiffCategory};
use chatfsm_core::filter::filtered_or_whole;
use chatfsm_core::fsm::FsmDocument;
use chatfsm_core::retrieval::{index_codebase, retrieve, wrap_context};
use chatfsm_llm::{Gateway, LlmError};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::pairs::EvalPair;

pub const DEFAULT_TOP_K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Filter,
    ChangeRequest,
    Context,
    Modify,
    ExtractReply,
    GroundTruth,
    Diff,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Filter,
        Stage::ChangeRequest,
        Stage::Context,
        Stage::Modify,
        Stage::ExtractReply,
        Stage::GroundTruth,
        Stage::Diff,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Filter => "filter",
            Stage::ChangeRequest => "change_request",
            Stage::Context => "context",
            Stage::Modify => "modify",
            Stage::ExtractReply => "extract_reply",
            Stage::GroundTruth => "ground_truth",
            Stage::Diff => "diff",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub with_context: bool,
    pub top_k: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            with_context: false,
            top_k: DEFAULT_TOP_K,
        }
    }
}

impl RunOptions {
    pub fn with_context(with_context: bool) -> Self {
        Self {
            with_context,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalResult {
    pub pair_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<DiffCategory>,
    pub diff_messages: Vec<String>,
    /// Wall-clock seconds per stage, in execution order.
    pub stage_times: IndexMap<Stage, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<StageFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub change_request: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context_query: Option<String>,
    /// `path:start-end` of every chunk sent as context.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub context_chunks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modify_digest: Option<String>,
}

impl EvalResult {
    fn new(pair_id: &str) -> Self {
        Self {
            pair_id: pair_id.to_owned(),
            category: None,
            diff_messages: Vec::new(),
            stage_times: IndexMap::new(),
            failure: None,
            change_request: None,
            context_query: None,
            context_chunks: Vec::new(),
            modify_digest: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn seconds(&self, stage: Stage) -> Option<f64> {
        self.stage_times.get(&stage).copied()
    }
}

struct StageError {
    kind: String,
    message: String,
}

impl From<LlmError> for StageError {
    fn from(e: LlmError) -> Self {
        Self {
            kind: e.kind().to_owned(),
            message: e.to_string(),
        }
    }
}

impl StageError {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.to_owned(),
            message: message.into(),
        }
    }
}

/// Runs every stage in order and records its time. The first failing stage
/// ends the run; the failure is part of the result rather than an error.
pub fn run_pipeline(pair: &EvalPair, gateway: &Gateway, options: &RunOptions) -> EvalResult {
    let mut result = EvalResult::new(&pair.pair_id);
    if let Err((stage, e)) = stages(pair, gateway, options, &mut result) {
        log::warn!("{}: {stage} failed: {}", pair.pair_id, e.message);
        result.category = None;
        result.diff_messages.clear();
        result.failure = Some(StageFailure {
            stage,
            kind: e.kind,
            message: e.message,
        });
    }
    result
}

fn timed<T>(
    result: &mut EvalResult,
    stage: Stage,
    f: impl FnOnce(&mut EvalResult) -> Result<T, StageError>,
) -> Result<T, (Stage, StageError)> {
    let start = Instant::now();
    let out = f(result);
    result.stage_times.insert(stage, start.elapsed().as_secs_f64());
    out.map_err(|e| (stage, e))
}

fn stages(
    pair: &EvalPair,
    gateway: &Gateway,
    options: &RunOptions,
    result: &mut EvalResult,
) -> Result<(), (Stage, StageError)> {
    let (parent, child) = timed(result, Stage::Filter, |_| {
        Ok((
            filtered_or_whole(&pair.parent_source, &pair.parent_path),
            filtered_or_whole(&pair.child_source, &pair.child_path),
        ))
    })?;

    let request = timed(result, Stage::ChangeRequest, |r| {
        let request = match &pair.change_request {
            Some(request) => request.clone(),
            None => gateway.summarize_changes(&parent, &child)?.value,
        };
        r.change_request = Some(request.clone());
        Ok(request)
    })?;

    let context = if options.with_context {
        Some(timed(result, Stage::Context, |r| {
            let codebase = pair
                .codebase_dir
                .as_deref()
                .ok_or_else(|| StageError::new("no_codebase", "context requested but the pair has no codebase"))?;
            let query = gateway.generate_context_query(&request)?.value;
            let (index, warnings) = index_codebase(codebase).map_err(|e| StageError::new("index", e.to_string()))?;
            for w in warnings {
                log::warn!("{}: skipped {} ({})", pair.pair_id, w.path, w.reason);
            }
            let bundle = retrieve(&index, &query, options.top_k);
            r.context_query = Some(query);
            r.context_chunks = bundle
                .chunks
                .iter()
                .map(|s| format!("{}:{}-{}", s.chunk.path, s.chunk.start_line, s.chunk.end_line))
                .collect();
            Ok(wrap_context(&bundle))
        })?)
    } else {
        None
    };

    let reply = timed(result, Stage::Modify, |r| {
        let reply = gateway.modify_fsm(&parent, &request, context.as_deref())?;
        r.modify_digest = Some(reply.digest);
        Ok(reply.value)
    })?;

    let extracted = timed(result, Stage::ExtractReply, |_| Ok(gateway.extract_fsm(&reply)?.value))?;

    let ground_truth: FsmDocument = timed(result, Stage::GroundTruth, |_| match &pair.ground_truth {
        Some(doc) => Ok(doc.clone()),
        None => Ok(gateway.extract_fsm(&child)?.value),
    })?;

    timed(result, Stage::Diff, |r| {
        let report = categorize(&ground_truth, &extracted);
        r.diff_messages = report.messages();
        r.category = Some(report.category);
        Ok(())
    })
}

/// All pairs, one thread each; results come back in pair order.
pub fn run_pairs(pairs: &[EvalPair], gateway: &Gateway, options: &RunOptions) -> Vec<EvalResult> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = pairs
            .iter()
            .map(|pair| scope.spawn(move || run_pipeline(pair, gateway, options)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("pipeline threads do not panic"))
            .collect()
    })
}
