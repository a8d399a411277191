//! HTTP API for interactive sessions.
//!
//! ```text
//! POST /api/session             {graph}                          -> {id, ...state}
//! GET  /api/session/{id}                                         -> state
//! POST /api/session/{id}/measure {vertex, basis, outcome?, b0?}  -> state
//! POST /api/session/{id}/lc      {vertex, delta}                 -> state
//! POST /api/session/{id}/undo                                    -> state
//! GET  /api/session/{id}/dot                                     -> DOT text
//! ```
//!
//! A state is `{id, graph, byproducts, constraints, history}`. Session ids
//! are handed out in creation order. Each session sits behind its own
//! mutex, so requests to one session run one at a time while different
//! sessions proceed in parallel.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cvgraph::action::{Action, FreshSymbols};
use cvgraph::graph::GraphDoc;
use cvgraph::{parse_rational, MeasurementBasis, OutcomeExpr, TrackedState, VertexId, WeightedGraph};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::{apply_action, state_json};

#[derive(Clone)]
struct Frame {
    state: TrackedState,
    fresh: FreshSymbols,
    entry: Option<Value>,
}

struct Session {
    frames: Vec<Frame>,
}

impl Session {
    fn current(&self) -> &Frame {
        self.frames.last().expect("a session always has its initial frame")
    }

    fn view(&self, id: &str) -> Value {
        let mut v = state_json(&self.current().state);
        v["id"] = json!(id);
        v["history"] = Value::Array(self.frames.iter().filter_map(|f| f.entry.clone()).collect());
        v
    }
}

#[derive(Default)]
struct AppState {
    next_id: AtomicU64,
    sessions: Mutex<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>,
}

impl AppState {
    fn session(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session {id}")))
    }
}

struct ApiError(StatusCode, String);

impl From<cvgraph::Error> for ApiError {
    fn from(e: cvgraph::Error) -> Self {
        ApiError(StatusCode::BAD_REQUEST, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

/// Builds the API router, with `static_dir` served for every other path.
pub fn router(static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/session", post(create))
        .route("/api/session/{id}", get(show))
        .route("/api/session/{id}/measure", post(measure))
        .route("/api/session/{id}/lc", post(lc))
        .route("/api/session/{id}/undo", post(undo))
        .route("/api/session/{id}/dot", get(dot))
        .with_state(Arc::new(AppState::default()));
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    graph: GraphDoc,
}

async fn create(State(app): State<Arc<AppState>>, Json(body): Json<CreateBody>) -> ApiResult {
    let graph = WeightedGraph::from_doc(&body.graph)?;
    let id = (app.next_id.fetch_add(1, Ordering::SeqCst) + 1).to_string();
    let session = Session {
        frames: vec![Frame { state: TrackedState::new(graph), fresh: FreshSymbols::new(), entry: None }],
    };
    let view = session.view(&id);
    app.sessions.lock().expect("session table lock").insert(id, Arc::new(tokio::sync::Mutex::new(session)));
    Ok(Json(view))
}

async fn show(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let s = s.lock().await;
    Ok(Json(s.view(&id)))
}

/// Rationals may arrive as JSON strings or integers.
fn text_of(v: &Value) -> Result<String, ApiError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() => Ok(n.to_string()),
        other => Err(ApiError(StatusCode::BAD_REQUEST, format!("expected a string or integer, got {other}"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureBody {
    vertex: String,
    basis: String,
    outcome: Option<Value>,
    b0: Option<String>,
}

async fn measure(State(app): State<Arc<AppState>>, Path(id): Path<String>, Json(body): Json<MeasureBody>) -> ApiResult {
    let action = Action {
        vertex: VertexId::new(body.vertex)?,
        basis: body.basis.parse::<MeasurementBasis>()?,
        outcome: body.outcome.as_ref().map(text_of).transpose()?.map(|o| OutcomeExpr::parse(&o)).transpose()?,
        b0: body.b0.map(VertexId::new).transpose()?,
    };
    let s = app.session(&id)?;
    let mut s = s.lock().await;
    let mut fresh = s.current().fresh.clone();
    if let Some(o) = &action.outcome {
        fresh.reserve(o);
    }
    let (state, entry) = apply_action(&s.current().state, &action, &mut fresh)?;
    s.frames.push(Frame { state, fresh, entry: Some(entry) });
    Ok(Json(s.view(&id)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LcBody {
    vertex: String,
    delta: Value,
}

async fn lc(State(app): State<Arc<AppState>>, Path(id): Path<String>, Json(body): Json<LcBody>) -> ApiResult {
    let a = VertexId::new(body.vertex)?;
    let delta = parse_rational(&text_of(&body.delta)?)?;
    let s = app.session(&id)?;
    let mut s = s.lock().await;
    let cur = s.current().clone();
    let state = cur.state.local_complement(&a, &delta)?;
    let entry = json!({ "op": "lc", "vertex": a.to_string(), "delta": cvgraph::format_rational(&delta) });
    s.frames.push(Frame { state, fresh: cur.fresh, entry: Some(entry) });
    Ok(Json(s.view(&id)))
}

async fn undo(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let mut s = s.lock().await;
    if s.frames.len() == 1 {
        return Err(ApiError(StatusCode::CONFLICT, "nothing to undo".into()));
    }
    s.frames.pop();
    Ok(Json(s.view(&id)))
}

async fn dot(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = app.session(&id)?;
    let s = s.lock().await;
    let text = s.current().state.graph.to_dot();
    Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")], text).into_response())
}
