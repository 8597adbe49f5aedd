use std::time::{SystemTime, UNIX_EPOCH};

use chatfsm_core::diff::DiffReport;
use chatfsm_core::fsm::FsmDocument;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::error::ErrorBody;

/// One applied change request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Exchange {
    pub request: String,
    pub with_context: bool,
    pub reply_code: String,
    /// Against the code before this change.
    pub diff: DiffReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub session_id: Uuid,
    pub current_code: String,
    pub history: Vec<Exchange>,
    /// Unix seconds.
    pub created_at: u64,
}

impl Session {
    pub fn new(code: String) -> Self {
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            session_id: Uuid::new_v4(),
            current_code: code,
            history: Vec::new(),
            created_at,
        }
    }
}

/// A session with the extraction of its current code, once known. Failed
/// extractions are kept so the diagnostics can be returned again.
#[derive(Debug)]
pub(crate) struct Slot {
    pub session: Session,
    pub extraction: Option<Result<FsmDocument, ErrorBody>>,
}

impl Slot {
    pub fn new(session: Session) -> Self {
        Self {
            session,
            extraction: None,
        }
    }
}
