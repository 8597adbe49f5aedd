//! Replayable evaluation of the modification agent over parent/child
//! fixture pairs: per-pair pipeline runs, categorized outcomes and the
//! correctness and latency tables.

use std::path::{Path, PathBuf};

pub mod pairs;
pub mod pipeline;
pub mod report;
pub mod script;

pub use pairs::{load_pairs, EvalPair, PairWarning};
pub use pipeline::{run_pairs, run_pipeline, EvalResult, RunOptions, Stage, StageFailure};
pub use report::{report, Report, RunRecord};

use chatfsm_llm::{Gateway, LlmError};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("authoring failed: {0}")]
    Authoring(String),
}

impl EvalError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        EvalError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

/// The bundled fixture tree.
pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// A suite is named after its directory.
pub fn suite_name(dir: &Path) -> String {
    dir.file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("pairs")
        .to_owned()
}

/// Loads and runs every pair under `dir` with one gateway.
pub fn run_suite(dir: &Path, gateway: &Gateway, options: &RunOptions) -> Result<RunRecord, EvalError> {
    let (pairs, _) = load_pairs(dir)?;
    Ok(RunRecord {
        suite: suite_name(dir),
        model: gateway.model_id().to_owned(),
        with_context: options.with_context,
        cassette_mode: gateway.cassette_mode(),
        results: run_pairs(&pairs, gateway, options),
    })
}
