//! Lexical retrieval over a codebase snapshot.
//!
//! Files are cut into overlapping line windows and scored against a query
//! with BM25. Length normalization uses the window size as a fixed pivot
//! instead of the corpus average, so adding files that share no terms with a
//! query rescales its scores without reordering them.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

pub const WINDOW_LINES: usize = 60;
pub const STRIDE_LINES: usize = 40;
pub const BUDGET_CHARS: usize = 12_000;
pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;
pub const INDEX_VERSION: u32 = 1;

pub const CONTEXT_WRAPPER: &str = "Answer the user's questions based on the context below:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChunkRecord {
    /// Relative to the indexed root, `/`-separated.
    pub path: String,
    pub start_line: usize,
    pub end_line: usize,
    pub text: String,
    /// Lowercased token multiset as term counts.
    pub token_set: BTreeMap<String, u32>,
}

impl ChunkRecord {
    pub fn line_count(&self) -> usize {
        self.end_line - self.start_line + 1
    }

    fn rendered(&self) -> String {
        format!("--- {}:{}-{}\n{}\n", self.path, self.start_line, self.end_line, self.text)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Index {
    pub version: u32,
    pub chunks: Vec<ChunkRecord>,
    pub doc_freq: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoredChunk {
    pub chunk: ChunkRecord,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ContextBundle {
    pub chunks: Vec<ScoredChunk>,
    pub budget_chars: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexWarning {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("index file is not valid: {0}")]
    Format(#[from] serde_json::Error),
    #[error("unsupported index version {0}")]
    Version(u32),
}

/// Lowercased runs of ASCII letters, digits and underscores.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(str::to_ascii_lowercase)
        .collect()
}

/// 1-based inclusive line windows for a file of `n` lines.
pub fn windows(n: usize) -> Vec<(usize, usize)> {
    (0..)
        .map(|k| 1 + k * STRIDE_LINES)
        .take_while(|&start| start <= n)
        .map(|start| (start, (start + WINDOW_LINES - 1).min(n)))
        .collect()
}

impl Index {
    /// Builds an index from in-memory files. Paths are sorted first, so the
    /// result does not depend on the order they are given in.
    pub fn from_files<P: AsRef<str>, T: AsRef<str>>(files: impl IntoIterator<Item = (P, T)>) -> Self {
        let mut sorted: Vec<(String, String)> = files
            .into_iter()
            .map(|(p, t)| (p.as_ref().to_owned(), t.as_ref().to_owned()))
            .collect();
        sorted.sort();
        let mut chunks = Vec::new();
        for (path, text) in &sorted {
            let lines: Vec<&str> = text.lines().collect();
            for (start, end) in windows(lines.len()) {
                let body = lines[start - 1..end].join("\n");
                if body.trim().is_empty() {
                    continue;
                }
                let mut token_set = BTreeMap::new();
                for t in tokenize(&body) {
                    *token_set.entry(t).or_insert(0) += 1;
                }
                chunks.push(ChunkRecord {
                    path: path.clone(),
                    start_line: start,
                    end_line: end,
                    text: body,
                    token_set,
                });
            }
        }
        let mut doc_freq = BTreeMap::new();
        for c in &chunks {
            for t in c.token_set.keys() {
                *doc_freq.entry(t.clone()).or_insert(0) += 1;
            }
        }
        Index {
            version: INDEX_VERSION,
            chunks,
            doc_freq,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("index serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, IndexError> {
        let index: Index = serde_json::from_str(text)?;
        if index.version != INDEX_VERSION {
            return Err(IndexError::Version(index.version));
        }
        Ok(index)
    }

    pub fn save(&self, path: &Path) -> Result<(), IndexError> {
        fs::write(path, self.to_json()).map_err(|source| IndexError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, IndexError> {
        let text = fs::read_to_string(path).map_err(|source| IndexError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    fn idf(&self, term: &str) -> f64 {
        let n = self.chunks.len() as f64;
        let df = f64::from(self.doc_freq.get(term).copied().unwrap_or(0));
        ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
    }

    /// BM25 score of one chunk for a deduplicated term list.
    pub fn score(&self, chunk: &ChunkRecord, terms: &BTreeSet<String>) -> f64 {
        let norm = 1.0 - B + B * chunk.line_count() as f64 / WINDOW_LINES as f64;
        terms
            .iter()
            .filter_map(|t| chunk.token_set.get(t).map(|&tf| (t, f64::from(tf))))
            .map(|(t, tf)| self.idf(t) * tf * (K1 + 1.0) / (tf + K1 * norm))
            .sum()
    }
}

/// Walks `root` (skipping hidden entries) and indexes every readable UTF-8
/// file. Skipped files come back as warnings.
pub fn index_codebase(root: &Path) -> Result<(Index, Vec<IndexWarning>), IndexError> {
    if !root.is_dir() {
        return Err(IndexError::Io {
            path: root.display().to_string(),
            source: io::Error::new(io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    let walker = WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                warnings.push(IndexWarning {
                    path: e.path().map(|p| p.display().to_string()).unwrap_or_default(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        match fs::read(entry.path()) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(text) => files.push((rel, text)),
                Err(_) => warnings.push(IndexWarning {
                    path: rel,
                    reason: "not valid UTF-8".into(),
                }),
            },
            Err(e) => warnings.push(IndexWarning {
                path: rel,
                reason: e.to_string(),
            }),
        }
    }
    Ok((Index::from_files(files), warnings))
}

/// Top-`k` chunks by score, then whole chunks dropped from the tail until
/// the wrapped context fits `budget_chars`.
pub fn retrieve(index: &Index, query: &str, k: usize) -> ContextBundle {
    retrieve_with_budget(index, query, k, BUDGET_CHARS)
}

pub fn retrieve_with_budget(index: &Index, query: &str, k: usize, budget_chars: usize) -> ContextBundle {
    let terms: BTreeSet<String> = tokenize(query).into_iter().collect();
    let mut scored: Vec<ScoredChunk> = index
        .chunks
        .iter()
        .map(|c| ScoredChunk {
            score: quantize(index.score(c, &terms)),
            chunk: c.clone(),
        })
        .filter(|s| s.score > 0.0)
        .collect();
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.chunk.path.cmp(&b.chunk.path))
            .then_with(|| a.chunk.start_line.cmp(&b.chunk.start_line))
    });
    scored.truncate(k);
    let mut bundle = ContextBundle {
        chunks: scored,
        budget_chars,
    };
    while !bundle.chunks.is_empty() && wrap_context(&bundle).chars().count() > budget_chars {
        bundle.chunks.pop();
    }
    bundle
}

/// Rounds to 1e-9 so scores that are equal in exact arithmetic compare
/// equal and fall through to the path and line tie-break.
fn quantize(score: f64) -> f64 {
    (score * 1e9).round() / 1e9
}

/// The wrapper line, a blank line, then one headed block per chunk.
pub fn wrap_context(bundle: &ContextBundle) -> String {
    let mut out = format!("{CONTEXT_WRAPPER}\n\n");
    for s in &bundle.chunks {
        out.push_str(&s.chunk.rendered());
    }
    out
}
