//! Local HTTP bridge for interactive runs. One `MmpRun` per session; requests on a session are
//! serialized by its mutex, sessions never share state.

use std::collections::HashMap;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use mmp_core::arith::Rational;
use mmp_core::mmp::{Candidate, MmpRun};
use serde::Deserialize;
use serde_json::{json, Value};
use uuid::Uuid;

use crate::commands::{pair_report, rays_view, to_pretty, ServeArgs};
use crate::input::{parse_divisor, parse_pair, CliError};

const UI_PAGE: &str = include_str!("../assets/ui.html");

type Session = Arc<tokio::sync::Mutex<MmpRun>>;

/// Live what-if clones allowed per session.
pub const CLONE_LIMIT: usize = 8;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<Uuid, Session>>>,
    /// clone id -> parent id
    clones: Arc<Mutex<HashMap<Uuid, Uuid>>>,
    persist: Option<PathBuf>,
}

impl AppState {
    /// Restores every `<uuid>.json` trace snapshot under `persist` by replay.
    pub fn new(persist: Option<PathBuf>) -> Result<Self, CliError> {
        let state = AppState { sessions: Arc::default(), clones: Arc::default(), persist };
        if let Some(dir) = &state.persist {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Engine(format!("{}: {e}", dir.display())))?;
            let entries = std::fs::read_dir(dir).map_err(|e| CliError::Engine(e.to_string()))?;
            let mut map = state.sessions.lock().expect("session map poisoned");
            for entry in entries.flatten() {
                let path = entry.path();
                let Some(id) = path.file_stem().and_then(|s| s.to_str()).and_then(|s| Uuid::parse_str(s).ok()) else {
                    continue;
                };
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::Engine(e.to_string()))?;
                let trace = serde_json::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("snapshot {}: {e}", path.display())))?;
                let run = MmpRun::from_trace(&trace)?;
                map.insert(id, Arc::new(tokio::sync::Mutex::new(run)));
            }
        }
        Ok(state)
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    fn get(&self, id: &str) -> Result<Session, ApiError> {
        let id = Uuid::parse_str(id).map_err(|_| ApiError::NotFound)?;
        self.sessions.lock().expect("session map poisoned").get(&id).cloned().ok_or(ApiError::NotFound)
    }

    fn is_clone(&self, id: &str) -> bool {
        Uuid::parse_str(id).is_ok_and(|u| self.clones.lock().expect("clone map poisoned").contains_key(&u))
    }

    fn snapshot(&self, id: &str, run: &MmpRun) -> Result<(), ApiError> {
        if self.is_clone(id) {
            return Ok(());
        }
        if let Some(dir) = &self.persist {
            std::fs::write(dir.join(format!("{id}.json")), to_pretty(run.trace()))
                .map_err(|e| ApiError::Cli(CliError::Engine(format!("snapshot: {e}"))))?;
        }
        Ok(())
    }
}

pub enum ApiError {
    NotFound,
    CloneLimit,
    Conflict { message: String, candidates: Vec<Candidate> },
    Cli(CliError),
}

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        ApiError::Cli(e)
    }
}

impl From<mmp_core::Error> for ApiError {
    fn from(e: mmp_core::Error) -> Self {
        ApiError::Cli(e.into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NotFound => (StatusCode::NOT_FOUND, json!({ "error": "unknown session" })),
            ApiError::CloneLimit => {
                (StatusCode::TOO_MANY_REQUESTS, json!({ "error": format!("clone limit {CLONE_LIMIT} reached") }))
            }
            ApiError::Conflict { message, candidates } => {
                (StatusCode::CONFLICT, json!({ "error": message, "candidates": candidates }))
            }
            ApiError::Cli(e @ CliError::Validation(_)) => (StatusCode::BAD_REQUEST, json!({ "error": e.to_string() })),
            ApiError::Cli(e @ CliError::Engine(_)) => {
                (StatusCode::UNPROCESSABLE_ENTITY, json!({ "error": e.to_string() }))
            }
        };
        json_response(status, &body)
    }
}

fn json_response<T: serde::Serialize>(status: StatusCode, body: &T) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], to_pretty(body)).into_response()
}

fn body<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, ApiError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        ApiError::Cli(CliError::Validation(format!("at `{path}`: {}", e.into_inner())))
    })
}

pub fn state_view(id: &str, run: &MmpRun) -> Result<Value, ApiError> {
    let t = run.trace();
    Ok(json!({
        "id": id,
        "backend": t.backend,
        "rho": run.current().rho(),
        "scaling": run.scaling_divisor().is_some(),
        "lambda": run.lambda()?,
        "finished": run.is_finished(),
        "final_state": t.final_state,
        "steps": t.steps.len(),
        "last_step": t.steps.last(),
        "candidates": run.candidates()?,
        "model": run.current(),
    }))
}

async fn create(State(st): State<AppState>, text: String) -> Result<Response, ApiError> {
    let pair = parse_pair(&text)?;
    let run = MmpRun::plain(pair, "explicit", None)?;
    let id = Uuid::new_v4();
    let view = state_view(&id.to_string(), &run)?;
    st.snapshot(&id.to_string(), &run)?;
    st.sessions.lock().expect("session map poisoned").insert(id, Arc::new(tokio::sync::Mutex::new(run)));
    Ok(json_response(StatusCode::CREATED, &view))
}

/// Copies a session for what-if previews. Clones are ordinary sessions that are never persisted.
async fn clone_session(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let parent = Uuid::parse_str(&id).map_err(|_| ApiError::NotFound)?;
    let s = st.get(&id)?;
    let run = s.lock().await.clone();
    let new = Uuid::new_v4();
    {
        let mut clones = st.clones.lock().expect("clone map poisoned");
        if clones.values().filter(|&&p| p == parent).count() >= CLONE_LIMIT {
            return Err(ApiError::CloneLimit);
        }
        clones.insert(new, parent);
    }
    let view = state_view(&new.to_string(), &run)?;
    st.sessions.lock().expect("session map poisoned").insert(new, Arc::new(tokio::sync::Mutex::new(run)));
    Ok(json_response(StatusCode::CREATED, &view))
}

async fn rays(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let run = s.lock().await;
    Ok(json_response(StatusCode::OK, &rays_view(run.current())?))
}

#[derive(Deserialize)]
struct RayChoice {
    ray: usize,
}

async fn apply_step(st: &AppState, id: &str, run: &mut MmpRun, ray: usize) -> Result<Response, ApiError> {
    if run.is_finished() {
        return Err(ApiError::Conflict { message: "run is finished".into(), candidates: Vec::new() });
    }
    let candidates = run.candidates()?;
    if !candidates.iter().any(|c| c.ray_index == ray) {
        return Err(ApiError::Conflict { message: format!("ray {ray} is not a candidate"), candidates });
    }
    run.step(ray)?;
    st.snapshot(id, run)?;
    Ok(json_response(StatusCode::OK, &state_view(id, run)?))
}

async fn step(State(st): State<AppState>, Path(id): Path<String>, text: String) -> Result<Response, ApiError> {
    let choice: RayChoice = body(&text)?;
    let s = st.get(&id)?;
    let mut run = s.lock().await;
    apply_step(&st, &id, &mut run, choice.ray).await
}

#[derive(Deserialize)]
struct ScaleStart {
    #[serde(rename = "C")]
    c: Value,
}

/// Restarts the session as a scaling run from its current model; the trace starts afresh.
async fn scale_start(State(st): State<AppState>, Path(id): Path<String>, text: String) -> Result<Response, ApiError> {
    let req: ScaleStart = body(&text)?;
    let s = st.get(&id)?;
    let mut run = s.lock().await;
    let pair = run.current().clone();
    let c: Vec<Rational> = match &req.c {
        Value::String(spec) => parse_divisor(spec, &pair)?,
        other => {
            let c: Vec<Rational> = body(&other.to_string())?;
            pair.check_divisor(&c)?;
            c
        }
    };
    *run = MmpRun::scaling(pair, c, "explicit", None)?;
    st.snapshot(&id, &run)?;
    Ok(json_response(StatusCode::OK, &state_view(&id, &run)?))
}

async fn scale_choose(State(st): State<AppState>, Path(id): Path<String>, text: String) -> Result<Response, ApiError> {
    let choice: RayChoice = body(&text)?;
    let s = st.get(&id)?;
    let mut run = s.lock().await;
    if run.scaling_divisor().is_none() {
        return Err(ApiError::Conflict { message: "no scaling run in progress".into(), candidates: Vec::new() });
    }
    apply_step(&st, &id, &mut run, choice.ray).await
}

async fn trace(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let run = s.lock().await;
    Ok(json_response(StatusCode::OK, run.trace()))
}

async fn report(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let run = s.lock().await;
    let mut r = pair_report(run.current())?;
    r["final_state"] = json!(run.trace().final_state);
    Ok(json_response(StatusCode::OK, &r))
}

async fn delete(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let uuid = Uuid::parse_str(&id).map_err(|_| ApiError::NotFound)?;
    st.sessions.lock().expect("session map poisoned").remove(&uuid).ok_or(ApiError::NotFound)?;
    let mut clones = st.clones.lock().expect("clone map poisoned");
    clones.remove(&uuid);
    drop(clones);
    if let Some(dir) = &st.persist {
        let _ = std::fs::remove_file(dir.join(format!("{id}.json")));
    }
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn ui() -> Html<&'static str> {
    Html(UI_PAGE)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/session", post(create))
        .route("/session/{id}", axum::routing::delete(delete))
        .route("/session/{id}/clone", post(clone_session))
        .route("/session/{id}/rays", get(rays))
        .route("/session/{id}/step", post(step))
        .route("/session/{id}/scale/start", post(scale_start))
        .route("/session/{id}/scale/choose", post(scale_choose))
        .route("/session/{id}/trace", get(trace))
        .route("/session/{id}/report", get(report))
        .route("/ui", get(ui))
        .with_state(state)
}

pub fn serve_blocking(args: &ServeArgs) -> Result<(), CliError> {
    let state = AppState::new(args.persist.clone())?;
    let host = if args.allow_remote { Ipv4Addr::UNSPECIFIED } else { Ipv4Addr::LOCALHOST };
    let addr = SocketAddr::from((host, args.port));
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Engine(e.to_string()))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::Engine(format!("bind {addr}: {e}")))?;
        eprintln!("listening on http://{addr} ({} restored sessions)", state.session_count());
        axum::serve(listener, router(state)).await.map_err(|e| CliError::Engine(e.to_string()))
    })
}
