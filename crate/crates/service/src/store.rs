//! Optional on-disk session store: one JSON file per session.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use uuid::Uuid;

use crate::session::Session;

#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_owned() })
    }

    fn path(&self, id: Uuid) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Written to a temporary name first so a crash never leaves half a file.
    pub fn save(&self, session: &Session) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(session).expect("sessions serialize");
        text.push('\n');
        let path = self.path(session.session_id);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text)?;
        fs::rename(tmp, path)
    }

    /// Every readable session; unreadable files are logged and skipped.
    pub fn load_all(&self) -> io::Result<Vec<Session>> {
        let mut sessions = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            match fs::read_to_string(&path).map_err(|e| e.to_string()).and_then(|t| {
                serde_json::from_str::<Session>(&t).map_err(|e| e.to_string())
            }) {
                Ok(session) => sessions.push(session),
                Err(e) => log::warn!("skipping session file {}: {e}", path.display()),
            }
        }
        sessions.sort_by_key(|s| (s.created_at, s.session_id));
        Ok(sessions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let session = Session::new("code".into());
        store.save(&session).unwrap();
        fs::write(dir.path().join("junk.json"), "{").unwrap();
        assert_eq!(store.load_all().unwrap(), vec![session]);
    }
}
