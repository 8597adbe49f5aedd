//! HTTP facade over the toolkit: chat-driven modification sessions,
//! extraction, diffing and DOT rendering.
//!
//! Sessions live in memory and vanish on restart unless a store directory
//! is configured, in which case each session is mirrored to a JSON file.

mod api;
pub mod error;
pub mod session;
pub mod store;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::DefaultBodyLimit;
use axum::routing::{get, post};
use axum::Router;
use chatfsm_core::retrieval::Index;
use chatfsm_llm::Gateway;
use tokio::sync::{Mutex, RwLock};
use uuid::Uuid;

pub use error::{ApiError, ErrorBody};
pub use session::{Exchange, Session};
pub use store::SessionStore;

use session::Slot;

/// Largest accepted request body.
pub const BODY_LIMIT: usize = 1024 * 1024;
pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_TOP_K: usize = 3;

pub struct ServiceConfig {
    pub gateway: Gateway,
    pub store_dir: Option<PathBuf>,
    /// Codebase index for change requests that ask for context.
    pub context_index: Option<Index>,
    pub top_k: usize,
}

impl ServiceConfig {
    pub fn new(gateway: Gateway) -> Self {
        Self {
            gateway,
            store_dir: None,
            context_index: None,
            top_k: DEFAULT_TOP_K,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("session store {path}: {source}")]
    Store {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Serve(std::io::Error),
}

pub(crate) struct AppState {
    gateway: Gateway,
    store: Option<SessionStore>,
    index: Option<Arc<Index>>,
    top_k: usize,
    sessions: RwLock<HashMap<Uuid, Arc<Mutex<Slot>>>>,
}

/// Builds the router, loading stored sessions when a store is configured.
pub fn app(config: ServiceConfig) -> Result<Router, ServiceError> {
    let mut sessions = HashMap::new();
    let store = match &config.store_dir {
        Some(dir) => {
            let err = |source| ServiceError::Store {
                path: dir.clone(),
                source,
            };
            let store = SessionStore::open(dir).map_err(err)?;
            for session in store.load_all().map_err(err)? {
                sessions.insert(session.session_id, Arc::new(Mutex::new(Slot::new(session))));
            }
            Some(store)
        }
        None => None,
    };
    let state = Arc::new(AppState {
        gateway: config.gateway,
        store,
        index: config.context_index.map(Arc::new),
        top_k: config.top_k,
        sessions: RwLock::new(sessions),
    });
    Ok(Router::new()
        .route("/sessions", post(api::create_session))
        .route("/sessions/{id}", get(api::get_session))
        .route("/sessions/{id}/changes", post(api::post_change))
        .route("/sessions/{id}/fsm", get(api::get_fsm))
        .route("/sessions/{id}/dot", get(api::get_dot))
        .route("/extract", post(api::extract))
        .route("/diff", post(api::diff))
        .route("/viz", post(api::viz))
        .fallback(api::no_route)
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state))
}

pub async fn serve(config: ServiceConfig, addr: SocketAddr) -> Result<(), ServiceError> {
    let router = app(config)?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Bind { addr, source })?;
    log::info!("listening on {addr}");
    axum::serve(listener, router).await.map_err(ServiceError::Serve)
}
