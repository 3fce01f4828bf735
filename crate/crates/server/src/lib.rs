//! JSON HTTP service for running a live draft against the H-score engine.
//!
//! | Method | Path | |
//! |---|---|---|
//! | POST | `/sessions` | create a session |
//! | POST | `/sessions/{id}/picks` | record a pick |
//! | POST | `/sessions/{id}/undo` | revert the latest pick in effect |
//! | GET | `/sessions/{id}/recommendations?top_k=&team=` | ranked H-scores |
//! | GET | `/sessions/{id}/whatif/{player_id}?team=` | one hypothetical pick |
//! | GET | `/sessions/{id}/state` | board and pick log |

pub mod session;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hscore::engine::{EngineSettings, Model, ObjectiveReport};
use hscore::ingest::{read_weekly_stats, PlayerRecord};
use hscore::{Error, LeagueConfig};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

pub use session::{Board, LogEntry, Mode, Recommendation, Session};

pub const DEFAULT_BUDGET: f64 = 200.0;

/// Server-wide state: the default player pool and live sessions.
pub struct AppState {
    pool: Arc<Vec<PlayerRecord>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(pool: Vec<PlayerRecord>) -> Arc<Self> {
        Arc::new(Self { pool: Arc::new(pool), sessions: RwLock::default(), next_id: AtomicU64::new(1) })
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown session `{id}`")))
    }
}

#[derive(Debug)]
pub struct ApiError(pub StatusCode, pub String);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UnknownPlayer(_) => StatusCode::NOT_FOUND,
            Error::AlreadyDrafted(_) | Error::Infeasible | Error::Domain(_) | Error::PoolExhausted(_) => {
                StatusCode::CONFLICT
            }
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn lock(s: &Mutex<Session>) -> std::sync::MutexGuard<'_, Session> {
    s.lock().expect("session poisoned")
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, Error> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(ApiError::from)
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct CreateSession {
    pub config: Option<LeagueConfig>,
    /// Weekly stats CSV; the server's pool when absent.
    pub stats_csv: Option<String>,
    pub mode: Mode,
    pub budget: Option<f64>,
    pub shortlist: Option<usize>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub session_id: String,
    pub mode: Mode,
    pub num_teams: usize,
    pub roster_size: usize,
    pub players: usize,
}

async fn create_session(State(app): State<Arc<AppState>>, Json(req): Json<CreateSession>) -> Result<(StatusCode, Json<Created>), ApiError> {
    let config = req.config.unwrap_or_default();
    config.validate()?;
    let budget = req.budget.unwrap_or(DEFAULT_BUDGET);
    let mut settings = EngineSettings::default();
    if let Some(s) = req.shortlist {
        settings.shortlist = s;
    }
    if let Some(m) = req.max_iters {
        settings.optimizer.max_iters = m;
    }
    let default_pool = app.pool.clone();
    let model = blocking(move || {
        let pool = match req.stats_csv {
            Some(csv) => read_weekly_stats(csv.as_bytes())?,
            None => default_pool.as_ref().clone(),
        };
        Model::new(pool, config, settings)
    })
    .await?;
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::Relaxed));
    let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let out = Created {
        session_id: id.clone(),
        mode: req.mode,
        num_teams: model.config.num_teams,
        roster_size: model.config.roster_size,
        players: model.players.len(),
    };
    let session = Session::new(id.clone(), model, req.mode, budget, created_at)?;
    app.sessions.write().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(out)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickView {
    pub ordinal: usize,
    pub team: usize,
    pub player_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub session_id: String,
    pub mode: Mode,
    pub created_at: u64,
    pub version: u64,
    pub num_teams: usize,
    pub roster_size: usize,
    pub team_on_clock: Option<usize>,
    pub picks: Vec<PickView>,
    pub rosters: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub money: Option<Vec<f64>>,
    pub log: Vec<LogEntry>,
}

fn state_view(s: &Session) -> StateView {
    let board = s.board();
    let draft = board.draft();
    let id = |i: usize| s.model.players[i].player_id.clone();
    StateView {
        session_id: s.id.clone(),
        mode: s.mode,
        created_at: s.created_at,
        version: s.version,
        num_teams: draft.num_teams,
        roster_size: draft.roster_size,
        team_on_clock: match s.mode {
            Mode::Snake => draft.team_on_clock(),
            Mode::Auction => None,
        },
        picks: draft.picks.iter().map(|p| PickView { ordinal: p.ordinal, team: p.team, player_id: id(p.player) }).collect(),
        rosters: draft.rosters.iter().map(|r| r.iter().map(|&i| id(i)).collect()).collect(),
        money: match board.as_ref() {
            Board::Auction(a) => Some(a.money.clone()),
            Board::Snake(_) => None,
        },
        log: s.log.clone(),
    }
}

async fn get_state(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StateView> {
    let s = app.session(&id)?;
    let view = state_view(&lock(&s));
    Ok(Json(view))
}

#[derive(Debug, Deserialize)]
pub struct PickRequest {
    pub player_id: String,
    pub team: Option<usize>,
    /// Accept a pick from a team that is not on the clock.
    #[serde(default, rename = "override")]
    pub override_order: bool,
    pub price: Option<f64>,
}

async fn post_pick(State(app): State<Arc<AppState>>, Path(id): Path<String>, Json(req): Json<PickRequest>) -> ApiResult<StateView> {
    let s = app.session(&id)?;
    let mut s = lock(&s);
    s.pick(req.team, &req.player_id, req.override_order, req.price)?;
    Ok(Json(state_view(&s)))
}

async fn post_undo(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StateView> {
    let s = app.session(&id)?;
    let mut s = lock(&s);
    s.undo()?;
    Ok(Json(state_view(&s)))
}

#[derive(Debug, Deserialize)]
pub struct RecommendQuery {
    pub top_k: Option<usize>,
    pub team: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendResponse {
    pub session_id: String,
    pub team: usize,
    pub version: u64,
    pub recommendations: Vec<Recommendation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

async fn get_recommendations(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<RecommendQuery>,
) -> ApiResult<RecommendResponse> {
    let handle = app.session(&id)?;
    let (model, board, version, team, cached) = {
        let s = lock(&handle);
        let team = s.resolve_team(q.team)?;
        (s.model.clone(), s.board(), s.version, team, s.cached(team))
    };
    let all = match cached {
        Some(r) => r,
        None => {
            let recs = Arc::new(blocking(move || session::recommendations(&model, &board, team)).await?);
            lock(&handle).store(version, team, recs.clone());
            recs
        }
    };
    let take = q.top_k.unwrap_or(all.len()).min(all.len());
    let recommendations = all[..take].to_vec();
    let reason = all.is_empty().then(|| format!("no feasible candidates for team {team}"));
    Ok(Json(RecommendResponse { session_id: id, team, version, recommendations, reason }))
}

#[derive(Debug, Deserialize)]
pub struct WhatIfQuery {
    pub team: Option<usize>,
}

async fn get_what_if(
    State(app): State<Arc<AppState>>,
    Path((id, player_id)): Path<(String, String)>,
    Query(q): Query<WhatIfQuery>,
) -> ApiResult<ObjectiveReport> {
    let handle = app.session(&id)?;
    let (model, board, team) = {
        let s = lock(&handle);
        (s.model.clone(), s.board(), s.resolve_team(q.team)?)
    };
    Ok(Json(blocking(move || session::what_if(&model, &board, team, &player_id)).await?))
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/state", get(get_state))
        .route("/sessions/{id}/picks", post(post_pick))
        .route("/sessions/{id}/undo", post(post_undo))
        .route("/sessions/{id}/recommendations", get(get_recommendations))
        .route("/sessions/{id}/whatif/{player_id}", get(get_what_if))
        .layer(CorsLayer::permissive())
        .with_state(app)
}

/// Serves the API until the process is stopped.
pub async fn serve(addr: std::net::SocketAddr, app: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(app)).await
}
