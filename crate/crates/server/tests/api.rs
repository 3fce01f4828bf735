use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use hscore::engine::{make_pick, DraftState, EngineSettings, Model};
use hscore::LeagueConfig;
use hscore_server::{router, AppState, RecommendResponse, StateView};
use hscore_sim::synth::{generate_pool, SynthConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn pool() -> Vec<hscore::ingest::PlayerRecord> {
    generate_pool(&SynthConfig { players: 80, weeks: 12, seed: 3, ..Default::default() })
}

fn config() -> LeagueConfig {
    LeagueConfig { num_teams: 4, ..Default::default() }
}

fn app() -> Router {
    router(AppState::new(pool()))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn create(app: &Router, extra: Value) -> String {
    let mut body = json!({ "config": config(), "shortlist": 5, "max_iters": 8 });
    for (k, v) in extra.as_object().unwrap() {
        body[k] = v.clone();
    }
    let (status, v) = call(app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["session_id"].as_str().unwrap().to_string()
}

async fn state(app: &Router, id: &str) -> StateView {
    let (status, v) = call(app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(status, StatusCode::OK);
    serde_json::from_value(v).unwrap()
}

async fn recs(app: &Router, id: &str, query: &str) -> RecommendResponse {
    let (status, v) = call(app, "GET", &format!("/sessions/{id}/recommendations{query}"), None).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    serde_json::from_value(v).unwrap()
}

#[tokio::test]
async fn sessions_get_distinct_ids_and_bad_configs_are_rejected() {
    let app = app();
    let a = create(&app, json!({})).await;
    let b = create(&app, json!({})).await;
    assert_ne!(a, b);

    let bad = LeagueConfig { roster_size: 12, ..config() };
    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "config": bad }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{v}");
    assert!(v["error"].is_string());

    let (status, _) = call(&app, "GET", "/sessions/nope/state", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn picks_advance_the_board_and_duplicates_conflict() {
    let app = app();
    let id = create(&app, json!({})).await;
    let s0 = state(&app, &id).await;
    assert_eq!(s0.team_on_clock, Some(0));
    assert!(s0.picks.is_empty());

    let first = s0.rosters.len();
    assert_eq!(first, 4);
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/picks"), Some(json!({ "player_id": "p00" }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let s1 = state(&app, &id).await;
    assert_eq!(s1.picks.len(), 1);
    assert_eq!(s1.rosters[0], vec!["p00".to_string()]);
    assert_eq!(s1.team_on_clock, Some(1));
    assert!(s1.version > s0.version);

    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/picks"), Some(json!({ "player_id": "p00" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/picks"), Some(json!({ "player_id": "zz" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    // out of turn without an override
    let (status, _) =
        call(&app, "POST", &format!("/sessions/{id}/picks"), Some(json!({ "player_id": "p01", "team": 3 }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/picks"),
        Some(json!({ "player_id": "p01", "team": 3, "override": true })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state(&app, &id).await.rosters[3], vec!["p01".to_string()]);
}

#[tokio::test]
async fn undo_restores_board_and_recommendations() {
    let app = app();
    let id = create(&app, json!({})).await;
    call(&app, "POST", &format!("/sessions/{id}/picks"), Some(json!({ "player_id": "p05" }))).await;
    let before = state(&app, &id).await;
    let recs_before = recs(&app, &id, "").await;

    call(&app, "POST", &format!("/sessions/{id}/picks"), Some(json!({ "player_id": "p06" }))).await;
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    let after = state(&app, &id).await;
    assert_eq!(after.picks, before.picks);
    assert_eq!(after.rosters, before.rosters);
    assert_eq!(after.team_on_clock, before.team_on_clock);
    // the log keeps the history
    assert_eq!(after.log.len(), 3);
    let recs_after = recs(&app, &id, "").await;
    assert_eq!(recs_after.recommendations, recs_before.recommendations);

    call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn top_recommendation_matches_the_engine() {
    let app = app();
    let id = create(&app, json!({})).await;
    let all = recs(&app, &id, "").await;
    assert_eq!(all.team, 0);
    assert_eq!(all.recommendations.len(), 5);
    assert!(all.reason.is_none());
    for w in all.recommendations.windows(2) {
        let (a, b) = (&w[0].report, &w[1].report);
        assert!(a.value > b.value || (a.value == b.value && a.player_id < b.player_id));
    }
    let top = recs(&app, &id, "?top_k=1").await;
    assert_eq!(top.recommendations.len(), 1);
    assert_eq!(top.recommendations[0], all.recommendations[0]);
    assert_eq!(recs(&app, &id, "?top_k=1").await, top);

    let mut settings = EngineSettings { shortlist: 5, ..Default::default() };
    settings.optimizer.max_iters = 8;
    let model = Model::new(pool(), config(), settings).unwrap();
    let (_, report) = make_pick(&model, &DraftState::new(&model), 0).unwrap();
    assert_eq!(report, top.recommendations[0].report);
}

#[tokio::test]
async fn what_if_is_read_only_and_agrees_with_ranking() {
    let app = app();
    let id = create(&app, json!({})).await;
    let top = recs(&app, &id, "?top_k=1").await.recommendations.remove(0).report;
    let before = state(&app, &id).await;
    let (status, v) = call(&app, "GET", &format!("/sessions/{id}/whatif/{}", top.player_id), None).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let report: hscore::engine::ObjectiveReport = serde_json::from_value(v).unwrap();
    assert_eq!(report, top);
    assert_eq!(state(&app, &id).await, before);

    call(&app, "POST", &format!("/sessions/{id}/picks"), Some(json!({ "player_id": top.player_id }))).await;
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/whatif/{}?team=1", top.player_id), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn auction_sessions_price_players_and_track_money() {
    let app = app();
    let id = create(&app, json!({ "mode": "auction", "budget": 100.0 })).await;
    let r = recs(&app, &id, "?team=2").await;
    assert_eq!(r.team, 2);
    assert!(!r.recommendations.is_empty());
    assert!(r.recommendations.iter().all(|x| x.dollars.is_some_and(|d| d >= 0.0)));

    // price is required
    let (status, _) =
        call(&app, "POST", &format!("/sessions/{id}/picks"), Some(json!({ "player_id": "p00", "team": 2 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/picks"),
        Some(json!({ "player_id": "p00", "team": 2, "price": 30.0 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let s = state(&app, &id).await;
    assert_eq!(s.money.unwrap(), vec![100.0, 100.0, 70.0, 100.0]);
    assert_eq!(s.team_on_clock, None);
}
