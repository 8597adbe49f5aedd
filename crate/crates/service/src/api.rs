use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use chatfsm_core::diff::{categorize, DiffReport};
use chatfsm_core::fsm::{parse_fsm_value, serialize_fsm_json, validate_fsm, FsmDocument, ValidationReport};
use chatfsm_core::retrieval::{retrieve, wrap_context};
use chatfsm_core::viz::{diff_overlay, to_dot, DotOptions, RankDirection};
use chatfsm_llm::LlmError;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::Mutex;
use uuid::Uuid;

use crate::error::{ApiError, ApiJson};
use crate::session::{Exchange, Session, Slot};
use crate::AppState;

type Shared = State<Arc<AppState>>;

const DOT_CONTENT_TYPE: &str = "text/vnd.graphviz; charset=utf-8";

#[derive(Deserialize)]
pub(crate) struct CreateSession {
    code: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
pub(crate) struct ChangeRequest {
    request: String,
    #[serde(default)]
    with_context: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub(crate) struct ChangeResponse {
    reply_code: String,
    fsm: FsmDocument,
    diff: DiffReport,
    messages: Vec<String>,
    dot: String,
}

#[derive(Deserialize)]
pub(crate) struct ExtractRequest {
    code: String,
}

#[derive(Serialize)]
pub(crate) struct ExtractResponse {
    fsm: FsmDocument,
    validation: ValidationReport,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
pub(crate) struct DiffRequest {
    ground_truth: Value,
    input: Value,
}

#[derive(Serialize)]
pub(crate) struct DiffResponse {
    #[serde(flatten)]
    report: DiffReport,
    messages: Vec<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
pub(crate) struct VizRequest {
    fsm: Value,
    /// Draws `fsm` as a change against this document.
    #[serde(default)]
    against: Option<Value>,
    #[serde(default)]
    rankdir: Option<String>,
}

fn dot_response(dot: String) -> Response {
    ([(header::CONTENT_TYPE, DOT_CONTENT_TYPE)], dot).into_response()
}

fn document(value: &Value, field: &str) -> Result<FsmDocument, ApiError> {
    parse_fsm_value(value).map_err(|e| ApiError::bad_request("invalid_fsm", format!("{field}: {e}")))
}

fn nonempty(what: &str, text: &str) -> Result<(), ApiError> {
    if text.trim().is_empty() {
        return Err(ApiError::bad_request("empty_input", format!("{what} is empty")));
    }
    Ok(())
}

/// Runs a blocking gateway call off the async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, LlmError> + Send + 'static,
) -> Result<T, LlmError> {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(LlmError::Protocol(format!("gateway task failed: {e}"))))
}

impl AppState {
    async fn slot(&self, id: &str) -> Result<Arc<Mutex<Slot>>, ApiError> {
        let uuid = Uuid::parse_str(id).map_err(|_| ApiError::session_not_found(id))?;
        self.sessions
            .read()
            .await
            .get(&uuid)
            .cloned()
            .ok_or_else(|| ApiError::session_not_found(id))
    }

    fn persist(&self, session: &Session) -> Result<(), ApiError> {
        match &self.store {
            Some(store) => store
                .save(session)
                .map_err(|e| ApiError::internal(format!("cannot store session: {e}"))),
            None => Ok(()),
        }
    }

    async fn extract(&self, code: String) -> Result<FsmDocument, LlmError> {
        let gateway = self.gateway.clone();
        blocking(move || gateway.extract_fsm(&code).map(|r| r.value)).await
    }

    /// Extraction of the slot's current code, computed once per revision.
    /// Replies that do not parse are cached; transport failures are not.
    async fn current_fsm(&self, slot: &mut Slot) -> Result<FsmDocument, ApiError> {
        match &slot.extraction {
            Some(Ok(doc)) => return Ok(doc.clone()),
            Some(Err(body)) => {
                return Err(ApiError {
                    status: StatusCode::UNPROCESSABLE_ENTITY,
                    body: body.clone(),
                })
            }
            None => {}
        }
        match self.extract(slot.session.current_code.clone()).await {
            Ok(doc) => {
                slot.extraction = Some(Ok(doc.clone()));
                Ok(doc)
            }
            Err(err) => {
                let cacheable = matches!(err, LlmError::Extraction { .. });
                let err = ApiError::from(err);
                if cacheable {
                    slot.extraction = Some(Err(err.body.clone()));
                }
                Err(err)
            }
        }
    }

    async fn context(&self, request: &str) -> Result<String, ApiError> {
        let index = self.index.clone().ok_or_else(|| {
            ApiError::bad_request("no_codebase", "context was requested but the service has no codebase index")
        })?;
        let gateway = self.gateway.clone();
        let request = request.to_owned();
        let query = blocking(move || gateway.generate_context_query(&request).map(|r| r.value)).await?;
        Ok(wrap_context(&retrieve(&index, &query, self.top_k)))
    }
}

pub(crate) async fn create_session(State(state): Shared, ApiJson(body): ApiJson<CreateSession>) -> Result<Response, ApiError> {
    nonempty("code", &body.code)?;
    let session = Session::new(body.code);
    state.persist(&session)?;
    let id = session.session_id;
    let response = (StatusCode::CREATED, Json(session.clone())).into_response();
    state.sessions.write().await.insert(id, Arc::new(Mutex::new(Slot::new(session))));
    Ok(response)
}

pub(crate) async fn get_session(State(state): Shared, Path(id): Path<String>) -> Result<Json<Session>, ApiError> {
    let slot = state.slot(&id).await?;
    let session = slot.lock().await.session.clone();
    Ok(Json(session))
}

/// Modifies the current code, then extracts and diffs both revisions. The
/// session is only updated once every step has succeeded.
pub(crate) async fn post_change(
    State(state): Shared,
    Path(id): Path<String>,
    ApiJson(body): ApiJson<ChangeRequest>,
) -> Result<Json<ChangeResponse>, ApiError> {
    nonempty("request", &body.request)?;
    let slot = state.slot(&id).await?;
    let mut slot = slot.lock().await;
    let before = state.current_fsm(&mut slot).await?;
    let context = match body.with_context {
        true => Some(state.context(&body.request).await?),
        false => None,
    };

    let gateway = state.gateway.clone();
    let (code, request) = (slot.session.current_code.clone(), body.request.clone());
    let reply_code =
        blocking(move || gateway.modify_fsm(&code, &request, context.as_deref()).map(|r| r.value)).await?;
    let after = state.extract(reply_code.clone()).await?;

    let diff = categorize(&before, &after);
    let dot = diff_overlay(&before, &after, RankDirection::default());
    let mut session = slot.session.clone();
    session.history.push(Exchange {
        request: body.request,
        with_context: body.with_context,
        reply_code: reply_code.clone(),
        diff: diff.clone(),
    });
    session.current_code = reply_code.clone();
    state.persist(&session)?;
    slot.session = session;
    slot.extraction = Some(Ok(after.clone()));

    Ok(Json(ChangeResponse {
        reply_code,
        fsm: after,
        messages: diff.messages(),
        diff,
        dot,
    }))
}

pub(crate) async fn get_fsm(State(state): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let slot = state.slot(&id).await?;
    let doc = state.current_fsm(&mut *slot.lock().await).await?;
    let text = serialize_fsm_json(&doc).map_err(|e| {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_fsm", e.to_string())
    })?;
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}

pub(crate) async fn get_dot(State(state): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let slot = state.slot(&id).await?;
    let doc = state.current_fsm(&mut *slot.lock().await).await?;
    let dot = to_dot(&doc, &DotOptions::default())
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_fsm", e.to_string()))?;
    Ok(dot_response(dot))
}

pub(crate) async fn extract(State(state): Shared, ApiJson(body): ApiJson<ExtractRequest>) -> Result<Json<Value>, ApiError> {
    nonempty("code", &body.code)?;
    let fsm = state.extract(body.code).await?;
    let validation = validate_fsm(&fsm);
    Ok(Json(serde_json::to_value(ExtractResponse { fsm, validation }).expect("extractions serialize")))
}

pub(crate) async fn diff(ApiJson(body): ApiJson<DiffRequest>) -> Result<Json<Value>, ApiError> {
    let ground_truth = document(&body.ground_truth, "groundTruth")?;
    let input = document(&body.input, "input")?;
    let report = categorize(&ground_truth, &input);
    let messages = report.messages();
    Ok(Json(serde_json::to_value(DiffResponse { report, messages }).expect("diff reports serialize")))
}

pub(crate) async fn viz(ApiJson(body): ApiJson<VizRequest>) -> Result<Response, ApiError> {
    let rank_direction = match body.rankdir.as_deref() {
        Some(s) => s.parse().map_err(|e: String| ApiError::bad_request("invalid_rankdir", e))?,
        None => RankDirection::default(),
    };
    let fsm = document(&body.fsm, "fsm")?;
    let dot = match &body.against {
        Some(against) => diff_overlay(&document(against, "against")?, &fsm, rank_direction),
        None => to_dot(
            &fsm,
            &DotOptions {
                rank_direction,
                highlight_diff: None,
            },
        )
        .map_err(|e| ApiError::bad_request("invalid_fsm", e.to_string()))?,
    };
    Ok(dot_response(dot))
}

pub(crate) async fn no_route() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}
