//! A fixture-backed stand-in for the models, used to author the replay
//! cassette.
//!
//! Each pair's script directory holds what the models answered for that
//! pair: `summary.txt` (the change request), `query.txt` (the context
//! query) and optionally `reply.py`/`reply.json`, a modification that
//! differs from the child. A reply override is dropped in favor of the
//! child when the context block contains the text in `informed_by.txt`.
//! Extraction answers come from `extractions/{pair}_{parent,child}.json`.
//!
//! Both models give the same substance; their replies differ only in the
//! wrapping that the agents must strip.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chatfsm_core::filter::filtered_or_whole;
use chatfsm_llm::agents::{
    context_query_messages, extract_messages, modify_messages, summarize_changes_messages,
};
use chatfsm_llm::cassette::render_file;
use chatfsm_llm::{
    Cassette, CassetteMode, ChatMessage, Gateway, LlmError, LlmProviderConfig, ScriptedTransport, EVAL_MODELS,
};

use crate::pairs::{load_pairs, EvalPair};
use crate::pipeline::{run_pairs, RunOptions};
use crate::report::RunRecord;
use crate::{suite_name, EvalError};

pub const PAIRS_DIR: &str = "pairs";
pub const RERUNS_DIR: &str = "reruns";
pub const SCRIPT_DIR: &str = "script";
pub const EXTRACTIONS_DIR: &str = "extractions";
pub const CASSETTE_FILE: &str = "cassettes/eval.json";

#[derive(Debug, Clone)]
struct PairScript {
    parent: String,
    child: String,
    summary: String,
    query: String,
    reply: Option<String>,
    informed_by: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ScriptedModel {
    pairs: Vec<PairScript>,
    /// Code as sent for extraction, to the JSON answer.
    extractions: BTreeMap<String, String>,
}

fn read(path: &Path) -> Result<String, EvalError> {
    fs::read_to_string(path).map_err(|e| EvalError::io(path, e))
}

fn read_optional(path: &Path) -> Result<Option<String>, EvalError> {
    if path.is_file() {
        read(path).map(Some)
    } else {
        Ok(None)
    }
}

impl ScriptedModel {
    pub fn load(fixtures: &Path) -> Result<Self, EvalError> {
        let (pairs, _) = load_pairs(&fixtures.join(PAIRS_DIR))?;
        let mut scripts = Vec::new();
        let mut extractions = BTreeMap::new();
        for pair in &pairs {
            let dir = fixtures.join(SCRIPT_DIR).join(&pair.pair_id);
            let parent = filtered_or_whole(&pair.parent_source, &pair.parent_path);
            let child = filtered_or_whole(&pair.child_source, &pair.child_path);
            let answers = fixtures.join(EXTRACTIONS_DIR);
            extractions.insert(parent.clone(), read(&answers.join(format!("{}_parent.json", pair.pair_id)))?);
            extractions.insert(child.clone(), read(&answers.join(format!("{}_child.json", pair.pair_id)))?);
            let reply = read_optional(&dir.join("reply.py"))?;
            if let Some(reply) = &reply {
                extractions.insert(reply.clone(), read(&dir.join("reply.json"))?);
            }
            scripts.push(PairScript {
                parent,
                child,
                summary: read(&dir.join("summary.txt"))?.trim_end().to_owned(),
                query: read(&dir.join("query.txt"))?.trim_end().to_owned(),
                reply,
                informed_by: read_optional(&dir.join("informed_by.txt"))?.map(|s| s.trim_end().to_owned()),
            });
        }
        Ok(Self {
            pairs: scripts,
            extractions,
        })
    }

    pub fn respond(&self, model: &str, messages: &[ChatMessage]) -> Result<String, LlmError> {
        let unknown = || LlmError::Protocol("the script has no answer for this request".into());
        let same = |built: Result<Vec<ChatMessage>, LlmError>| built.map(|b| b == messages).unwrap_or(false);

        if let Some(json) = messages
            .get(1)
            .and_then(|m| self.extractions.get(&m.content))
            .filter(|_| messages.len() == 2)
        {
            if same(extract_messages(&messages[1].content)) {
                return Ok(dress_json(model, json));
            }
        }
        for pair in &self.pairs {
            if same(summarize_changes_messages(&pair.parent, &pair.child)) {
                return Ok(pair.summary.clone());
            }
            if same(context_query_messages(&pair.summary)) {
                return Ok(pair.query.clone());
            }
            let context = (messages.len() == 3).then(|| messages[1].content.as_str());
            if same(modify_messages(&pair.parent, &pair.summary, context)) {
                let informed = match (&pair.informed_by, context) {
                    (Some(marker), Some(c)) => c.contains(marker.as_str()),
                    _ => false,
                };
                let code = match &pair.reply {
                    Some(reply) if !informed => reply,
                    _ => &pair.child,
                };
                return Ok(dress_code(model, code));
            }
        }
        Err(unknown())
    }
}

fn is_llama(model: &str) -> bool {
    model.starts_with("llama")
}

fn dress_code(model: &str, code: &str) -> String {
    if is_llama(model) {
        format!(
            "Here is the modified code with the requested changes applied:\n\n```python\n{code}```\n\n\
             All other states keep their previous transitions."
        )
    } else {
        format!("```python\n{code}```")
    }
}

fn dress_json(model: &str, json: &str) -> String {
    if is_llama(model) {
        format!("The code contains the following finite state machine:\n\n{json}\nEach container outcome is listed as a final state.")
    } else {
        format!("```json\n{json}```")
    }
}

/// Everything the replay suites ask for, per model: the main pairs with and
/// without context, the reruns with context, and an extraction of every
/// parent (used by the service and the command line).
pub struct Authored {
    pub entries: BTreeMap<String, String>,
    pub records: Vec<RunRecord>,
}

impl Authored {
    pub fn render(&self) -> String {
        render_file(&self.entries)
    }
}

pub fn author(fixtures: &Path) -> Result<Authored, EvalError> {
    let model = Arc::new(ScriptedModel::load(fixtures)?);
    let cassette = Arc::new(Cassette::in_memory(CassetteMode::Record, BTreeMap::new()));
    let transport = {
        let model = Arc::clone(&model);
        Arc::new(ScriptedTransport::new(move |config, messages| model.respond(&config.model_id, messages)))
    };

    let suites: [(PathBuf, bool); 3] = [
        (fixtures.join(PAIRS_DIR), false),
        (fixtures.join(PAIRS_DIR), true),
        (fixtures.join(RERUNS_DIR), true),
    ];
    let mut records = Vec::new();
    for model_id in EVAL_MODELS {
        let gateway = Gateway::new(
            LlmProviderConfig::for_model(model_id),
            transport.clone(),
            Some(cassette.clone()),
        )?;
        for (dir, with_context) in &suites {
            let (pairs, _) = load_pairs(dir)?;
            let results = run_pairs(&pairs, &gateway, &RunOptions::with_context(*with_context));
            if let Some(failed) = results.iter().find(|r| r.failed()) {
                return Err(EvalError::Authoring(format!(
                    "{model_id} {}: {:?}",
                    failed.pair_id, failed.failure
                )));
            }
            records.push(RunRecord {
                suite: suite_name(dir),
                model: model_id.to_owned(),
                with_context: *with_context,
                cassette_mode: CassetteMode::Replay,
                results,
            });
        }
        let (pairs, _) = load_pairs(&fixtures.join(PAIRS_DIR))?;
        for pair in &pairs {
            gateway.extract_fsm(&parent_code(pair))?;
        }
    }
    Ok(Authored {
        entries: cassette.entries(),
        records,
    })
}

/// The parent as the pipeline sends it.
pub fn parent_code(pair: &EvalPair) -> String {
    filtered_or_whole(&pair.parent_source, &pair.parent_path)
}
