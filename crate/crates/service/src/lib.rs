//! HTTP/JSON backend for the interactive workbench: upload a dataset, look
//! at its scene, try rectangles, accept rules, mine, and read the report.
//!
//! Sessions live in memory. Each session sits behind its own lock, so
//! requests on one dataset are serialized for writers while readers share
//! a consistent view.

mod error;
mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use epc_core::data::{load_csv, PaddingPolicy};
use epc_core::geometry::{EllipseSpec, LayoutMode};
use epc_core::pipeline::{parse_ellipse, parse_weights, to_json};
use epc_core::rules::{DominanceRule, MatchMode, MiningParams, Rect};
use epc_core::scene::{SceneOptions, Visibility};

pub use error::ApiError;
pub use session::{DatasetOptions, Session, Snapshot, Summary, SNAPSHOT_VERSION};

type Shared = Arc<RwLock<Session>>;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<u64, Shared>>>,
    next_id: Arc<AtomicU64>,
}

impl AppState {
    fn insert(&self, s: Session) -> Summary {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed) + 1;
        let summary = s.summary(id);
        self.sessions.write().expect("sessions lock").insert(id, Arc::new(RwLock::new(s)));
        summary
    }

    fn get(&self, id: u64) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .expect("sessions lock")
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no dataset {id}")))
    }

    fn read<T>(&self, id: u64, f: impl FnOnce(&Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let s = self.get(id)?;
        let guard = s.read().expect("session lock");
        f(&guard)
    }

    fn write<T>(&self, id: u64, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let s = self.get(id)?;
        let mut guard = s.write().expect("session lock");
        f(&mut guard)
    }
}

/// All API routes, with permissive CORS, and the UI assets as fallback when given.
pub fn router(state: AppState, ui_assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/datasets", post(upload))
        .route("/api/import", post(import))
        .route("/api/datasets/:id", get(summary))
        .route("/api/datasets/:id/scene", get(scene))
        .route("/api/datasets/:id/evaluate", post(evaluate))
        .route("/api/datasets/:id/rules", post(add_rule).get(list_rules))
        .route("/api/datasets/:id/rules/:rule", delete(delete_rule))
        .route("/api/datasets/:id/mine", post(mine))
        .route("/api/datasets/:id/report", get(report))
        .route("/api/datasets/:id/weights", put(weights))
        .route("/api/datasets/:id/export", post(export))
        .with_state(state);
    let app = match ui_assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}

pub async fn serve(addr: SocketAddr, ui_assets: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::default(), ui_assets)).await
}

/// Runs the server on its own runtime until it stops.
pub fn serve_blocking(addr: SocketAddr, ui_assets: Option<PathBuf>) -> std::io::Result<()> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build()?.block_on(serve(addr, ui_assets))
}

/// JSON body whose syntax or shape errors are 400s.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

/// A document in the same pretty form the command line writes.
fn document<T: Serialize>(v: &T) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], to_json(v)).into_response()
}

fn flag(q: &HashMap<String, String>, key: &str, default: bool) -> Result<bool, ApiError> {
    match q.get(key).map(String::as_str) {
        None => Ok(default),
        Some("true" | "1") => Ok(true),
        Some("false" | "0") => Ok(false),
        Some(v) => Err(ApiError::bad_request(format!("{key} must be true or false, got '{v}'"))),
    }
}

async fn upload(
    State(st): State<AppState>,
    Query(q): Query<HashMap<String, String>>,
    csv: Bytes,
) -> Result<(StatusCode, Json<Summary>), ApiError> {
    let bad = |e: &dyn std::fmt::Display| ApiError::bad_request(e.to_string());
    let padding = match q.get("pad") {
        Some(p) => PaddingPolicy::parse(p).map_err(|e| bad(&e))?,
        None => PaddingPolicy::DuplicateLast,
    };
    let mode = match q.get("layout") {
        Some(l) => LayoutMode::parse(l).ok_or_else(|| ApiError::bad_request(format!("unknown layout '{l}'")))?,
        None => LayoutMode::Sequential,
    };
    let weights = q.get("weights").map(|w| parse_weights(w)).transpose().map_err(|e| bad(&e))?;
    let ellipse = match q.get("ellipse") {
        Some(e) => parse_ellipse(e).map_err(|e| bad(&e))?,
        None => EllipseSpec::unit(),
    };
    let options = DatasetOptions {
        label_column: q.get("label-column").cloned(),
        header: flag(&q, "header", true)?,
        padding,
        normalize: flag(&q, "normalize", true)?,
    };
    let raw = load_csv(&csv, &options.prepare().load)?;
    let session = Session::new(raw, options, mode, weights, ellipse)?;
    Ok((StatusCode::CREATED, Json(st.insert(session))))
}

async fn summary(State(st): State<AppState>, Path(id): Path<u64>) -> Result<Json<Summary>, ApiError> {
    st.read(id, |s| Ok(Json(s.summary(id))))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SceneQuery {
    visibility: Option<String>,
    selected_case: Option<String>,
}

async fn scene(
    State(st): State<AppState>,
    Path(id): Path<u64>,
    Query(q): Query<SceneQuery>,
) -> Result<Response, ApiError> {
    let visibility = match &q.visibility {
        Some(v) => v.parse::<Visibility>().map_err(ApiError::bad_request)?,
        None => Visibility::All,
    };
    let selected_case = match &q.selected_case {
        Some(c) => Some(c.parse::<usize>().map_err(|_| ApiError::bad_request(format!("bad selectedCase '{c}'")))?),
        None => None,
    };
    let opts = SceneOptions { visibility, selected_case, ..Default::default() };
    st.read(id, |s| Ok(document(&s.scene(&opts)?)))
}

#[derive(Debug, Deserialize)]
struct RectRequest {
    rect: Rect,
    mode: MatchMode,
}

async fn evaluate(State(st): State<AppState>, Path(id): Path<u64>, b: Bytes) -> Result<Response, ApiError> {
    let req: RectRequest = body(&b)?;
    st.read(id, |s| Ok(Json(s.evaluate(&req.rect, req.mode)?).into_response()))
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct RuleAccepted {
    rule: DominanceRule,
    active_count: usize,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct RuleList {
    rules: Vec<DominanceRule>,
    active_count: usize,
}

async fn add_rule(
    State(st): State<AppState>,
    Path(id): Path<u64>,
    b: Bytes,
) -> Result<(StatusCode, Json<RuleAccepted>), ApiError> {
    let req: RectRequest = body(&b)?;
    st.write(id, |s| {
        let rule = s.accept(req.rect, req.mode)?;
        Ok((StatusCode::CREATED, Json(RuleAccepted { rule, active_count: s.active_count() })))
    })
}

async fn list_rules(State(st): State<AppState>, Path(id): Path<u64>) -> Result<Json<RuleList>, ApiError> {
    st.read(id, |s| Ok(Json(RuleList { rules: s.rules.clone(), active_count: s.active_count() })))
}

async fn delete_rule(
    State(st): State<AppState>,
    Path((id, rule)): Path<(u64, usize)>,
) -> Result<Json<RuleList>, ApiError> {
    st.write(id, |s| {
        s.delete(rule)?;
        Ok(Json(RuleList { rules: s.rules.clone(), active_count: s.active_count() }))
    })
}

async fn mine(State(st): State<AppState>, Path(id): Path<u64>, b: Bytes) -> Result<Json<RuleList>, ApiError> {
    let params: MiningParams = body(&b)?;
    st.write(id, |s| {
        let rules = s.mine(&params)?;
        Ok(Json(RuleList { rules, active_count: s.active_count() }))
    })
}

async fn report(State(st): State<AppState>, Path(id): Path<u64>) -> Result<Response, ApiError> {
    st.read(id, |s| Ok(document(&s.report()?)))
}

#[derive(Debug, Deserialize)]
struct WeightsRequest {
    weights: Vec<f64>,
}

async fn weights(State(st): State<AppState>, Path(id): Path<u64>, b: Bytes) -> Result<Response, ApiError> {
    let req: WeightsRequest = body(&b)?;
    if req.weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(ApiError::bad_request("weights must be positive"));
    }
    st.write(id, |s| {
        let dropped = s.set_weights(req.weights)?;
        let warning = (dropped > 0).then(|| {
            let msg = format!("{dropped} accepted rules were built for the old layout and have been removed");
            log::warn!("dataset {id}: {msg}");
            msg
        });
        let scene = s.scene(&SceneOptions::default())?;
        Ok(document(&json!({ "warning": warning, "invalidatedRules": dropped, "scene": scene })))
    })
}

async fn export(State(st): State<AppState>, Path(id): Path<u64>) -> Result<Response, ApiError> {
    st.read(id, |s| Ok(document(&s.snapshot())))
}

async fn import(State(st): State<AppState>, b: Bytes) -> Result<(StatusCode, Json<Summary>), ApiError> {
    let snap: Snapshot = body(&b)?;
    let session = Session::restore(snap)?;
    Ok((StatusCode::CREATED, Json(st.insert(session))))
}
