//! Loading parent/child fixture pairs from disk.

use std::fs;
use std::path::{Path, PathBuf};

use chatfsm_core::fsm::{parse_fsm_json, validate_fsm, FsmDocument};
use serde::Serialize;

use crate::EvalError;

pub const GROUND_TRUTH_FILE: &str = "ground_true.json";
pub const REQUEST_FILE: &str = "request.txt";
pub const CODEBASE_DIR: &str = "codebase";

#[derive(Debug, Clone, PartialEq)]
pub struct EvalPair {
    pub pair_id: String,
    pub dir: PathBuf,
    pub parent_path: PathBuf,
    pub parent_source: String,
    pub child_path: PathBuf,
    /// Ground truth source.
    pub child_source: String,
    pub change_request: Option<String>,
    pub codebase_dir: Option<PathBuf>,
    /// Pre-extracted ground truth; skips extracting the child.
    pub ground_truth: Option<FsmDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWarning {
    pub dir: PathBuf,
    pub reason: String,
}

/// Every subdirectory of `dir` holding a parent and a child file, sorted by
/// pair id with numeric suffixes compared as numbers. Directories that do
/// not form a pair are skipped and reported.
pub fn load_pairs(dir: &Path) -> Result<(Vec<EvalPair>, Vec<PairWarning>), EvalError> {
    let entries = fs::read_dir(dir).map_err(|e| EvalError::io(dir, e))?;
    let mut subdirs = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| EvalError::io(dir, e))?;
        if entry.file_type().map_err(|e| EvalError::io(&entry.path(), e))?.is_dir() {
            subdirs.push(entry.path());
        }
    }

    let mut pairs = Vec::new();
    let mut warnings = Vec::new();
    for sub in subdirs {
        match load_pair(&sub) {
            Ok(pair) => pairs.push(pair),
            Err(reason) => {
                log::warn!("skipping {}: {reason}", sub.display());
                warnings.push(PairWarning { dir: sub, reason });
            }
        }
    }
    pairs.sort_by(|a, b| pair_order(&a.pair_id).cmp(&pair_order(&b.pair_id)));
    warnings.sort_by(|a, b| a.dir.cmp(&b.dir));
    Ok((pairs, warnings))
}

/// `pair10` after `pair9`.
fn pair_order(id: &str) -> (&str, u64, &str) {
    let stem = id.trim_end_matches(|c: char| c.is_ascii_digit());
    let number = id[stem.len()..].parse().unwrap_or(0);
    (stem, number, id)
}

pub fn load_pair(dir: &Path) -> Result<EvalPair, String> {
    let pair_id = dir
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or("directory name is not UTF-8")?
        .to_owned();
    let parent_path = find_stem(dir, "parent")?.ok_or("missing parent file")?;
    let child_path = find_stem(dir, "child")?.ok_or("missing child file")?;
    let parent_source = read_nonempty(&parent_path)?;
    let child_source = read_nonempty(&child_path)?;

    let request_path = dir.join(REQUEST_FILE);
    let change_request = if request_path.is_file() {
        Some(read_nonempty(&request_path)?.trim_end().to_owned())
    } else {
        None
    };

    let codebase = dir.join(CODEBASE_DIR);
    let codebase_dir = codebase.is_dir().then_some(codebase);

    let gt_path = dir.join(GROUND_TRUTH_FILE);
    let ground_truth = if gt_path.is_file() {
        let text = read_nonempty(&gt_path)?;
        let doc = parse_fsm_json(&text).map_err(|e| format!("{GROUND_TRUTH_FILE}: {e}"))?;
        let report = validate_fsm(&doc);
        if !report.valid {
            return Err(format!("{GROUND_TRUTH_FILE}: {}", report.error_summary()));
        }
        Some(doc)
    } else {
        None
    };

    Ok(EvalPair {
        pair_id,
        dir: dir.to_owned(),
        parent_path,
        parent_source,
        child_path,
        child_source,
        change_request,
        codebase_dir,
        ground_truth,
    })
}

/// The single file named `{stem}.*` (the ground truth JSON never counts).
fn find_stem(dir: &Path, stem: &str) -> Result<Option<PathBuf>, String> {
    let mut found: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_stem().and_then(|s| s.to_str()) == Some(stem))
        .collect();
    found.sort();
    match found.len() {
        0 => Ok(None),
        1 => Ok(found.pop()),
        _ => Err(format!("more than one {stem}.* file")),
    }
}

fn read_nonempty(path: &Path) -> Result<String, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if text.trim().is_empty() {
        return Err(format!("{} is empty", path.display()));
    }
    Ok(text)
}
