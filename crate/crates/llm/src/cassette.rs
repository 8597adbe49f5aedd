//! Recorded responses keyed by a digest of the request.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{ChatMessage, LlmError};

pub const CASSETTE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CassetteMode {
    /// Serve recorded entries; call the provider for misses and record them.
    Record,
    /// Serve recorded entries only; a miss is an error.
    Replay,
    /// Ignore the cassette and always call the provider.
    Passthrough,
}

impl fmt::Display for CassetteMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CassetteMode::Record => "record",
            CassetteMode::Replay => "replay",
            CassetteMode::Passthrough => "passthrough",
        })
    }
}

impl FromStr for CassetteMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "record" => Ok(CassetteMode::Record),
            "replay" => Ok(CassetteMode::Replay),
            "passthrough" => Ok(CassetteMode::Passthrough),
            other => Err(format!("unknown cassette mode `{other}` (record, replay, passthrough)")),
        }
    }
}

/// Hex SHA-256 of the canonical JSON form of the model id and messages.
pub fn request_digest(model_id: &str, messages: &[ChatMessage]) -> String {
    #[derive(Serialize)]
    struct Canonical<'a> {
        model: &'a str,
        messages: &'a [ChatMessage],
    }
    let bytes = serde_json::to_vec(&Canonical {
        model: model_id,
        messages,
    })
    .expect("messages serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CassetteFile {
    version: u32,
    entries: BTreeMap<String, String>,
}

#[derive(Debug)]
enum Store {
    /// Read without locking.
    Frozen(BTreeMap<String, String>),
    /// Single writer; every new entry is persisted before it is returned.
    Recording(Mutex<BTreeMap<String, String>>),
}

#[derive(Debug)]
pub struct Cassette {
    mode: CassetteMode,
    path: Option<PathBuf>,
    store: Store,
}

impl Cassette {
    /// Opens a cassette file. In record mode a missing file starts empty.
    pub fn open(path: &Path, mode: CassetteMode) -> Result<Self, LlmError> {
        let entries = match fs::read_to_string(path) {
            Ok(text) => parse_file(&text).map_err(|message| LlmError::Cassette {
                path: path.display().to_string(),
                message,
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound && mode != CassetteMode::Replay => BTreeMap::new(),
            Err(e) => {
                return Err(LlmError::Cassette {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })
            }
        };
        Ok(Self::with_entries(mode, Some(path.to_path_buf()), entries))
    }

    /// An unbacked cassette, for tests and authoring.
    pub fn in_memory(mode: CassetteMode, entries: BTreeMap<String, String>) -> Self {
        Self::with_entries(mode, None, entries)
    }

    fn with_entries(mode: CassetteMode, path: Option<PathBuf>, entries: BTreeMap<String, String>) -> Self {
        let store = match mode {
            CassetteMode::Record => Store::Recording(Mutex::new(entries)),
            _ => Store::Frozen(entries),
        };
        Self { mode, path, store }
    }

    pub fn mode(&self) -> CassetteMode {
        self.mode
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, digest: &str) -> Option<String> {
        match &self.store {
            Store::Frozen(m) => m.get(digest).cloned(),
            Store::Recording(m) => m.lock().expect("cassette lock").get(digest).cloned(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.store {
            Store::Frozen(m) => m.len(),
            Store::Recording(m) => m.lock().expect("cassette lock").len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Adds an entry and persists the file. Only valid in record mode.
    pub fn record(&self, digest: &str, response: &str) -> Result<(), LlmError> {
        let Store::Recording(m) = &self.store else {
            return Err(LlmError::Protocol(format!("cannot record into a {} cassette", self.mode)));
        };
        let mut entries = m.lock().expect("cassette lock");
        entries.insert(digest.to_owned(), response.to_owned());
        if let Some(path) = &self.path {
            write_file(path, &entries).map_err(|e| LlmError::Cassette {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn entries(&self) -> BTreeMap<String, String> {
        match &self.store {
            Store::Frozen(m) => m.clone(),
            Store::Recording(m) => m.lock().expect("cassette lock").clone(),
        }
    }
}

fn parse_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let file: CassetteFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if file.version != CASSETTE_VERSION {
        return Err(format!("unsupported cassette version {}", file.version));
    }
    Ok(file.entries)
}

/// The on-disk form: pretty JSON with sorted keys and a trailing newline.
pub fn render_file(entries: &BTreeMap<String, String>) -> String {
    let file = CassetteFile {
        version: CASSETTE_VERSION,
        entries: entries.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("cassette serializes");
    out.push('\n');
    out
}

fn write_file(path: &Path, entries: &BTreeMap<String, String>) -> std::io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, render_file(entries))?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_on_model_and_messages() {
        let m = [ChatMessage::system("s"), ChatMessage::user("u")];
        let a = request_digest("a", &m);
        assert_eq!(a.len(), 64);
        assert_eq!(a, request_digest("a", &m));
        assert_ne!(a, request_digest("b", &m));
        assert_ne!(a, request_digest("a", &m[..1]));
    }

    #[test]
    fn digest_is_pinned() {
        // Python hashlib over the compact JSON {"model":"m","messages":[{"role":"user","content":"hi"}]}
        assert_eq!(
            request_digest("m", &[ChatMessage::user("hi")]),
            "798d46639491d6c18f1779ddfca7da4b672f23a4cb57d66eeae48d9b8ccb6075"
        );
    }

    #[test]
    fn record_persists_and_replay_reads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let rec = Cassette::open(&path, CassetteMode::Record).unwrap();
        rec.record("d1", "hello").unwrap();
        let first = fs::read_to_string(&path).unwrap();
        let replay = Cassette::open(&path, CassetteMode::Replay).unwrap();
        assert_eq!(replay.get("d1").as_deref(), Some("hello"));
        assert!(replay.record("d2", "x").is_err());
        let rec2 = Cassette::open(&path, CassetteMode::Record).unwrap();
        rec2.record("d1", "hello").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), first);
    }

    #[test]
    fn replay_requires_the_file() {
        let dir = tempfile::tempdir().unwrap();
        assert!(Cassette::open(&dir.path().join("missing.json"), CassetteMode::Replay).is_err());
    }

    #[test]
    fn modes_parse() {
        for m in [CassetteMode::Record, CassetteMode::Replay, CassetteMode::Passthrough] {
            assert_eq!(m.to_string().parse::<CassetteMode>().unwrap(), m);
        }
    }
}
