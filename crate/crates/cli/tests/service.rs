use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use mmp_cli::service::{router, AppState, CLONE_LIMIT};
use mmp_core::toric::fan::standard::p2;
use mmp_core::toric::{is_isomorphic, Fan};
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

async fn call(app: &Router, method: Method, uri: &str, body: &str) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn call_json(app: &Router, method: Method, uri: &str, body: &str) -> (StatusCode, Value) {
    let (s, text) = call(app, method, uri, body).await;
    let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    assert_no_floats(&v);
    (s, v)
}

fn assert_no_floats(v: &Value) {
    match v {
        Value::Number(n) => assert!(!n.is_f64(), "float {n} in payload"),
        Value::Array(a) => a.iter().for_each(assert_no_floats),
        Value::Object(o) => o.values().for_each(assert_no_floats),
        _ => {}
    }
}

fn app() -> Router {
    router(AppState::new(None).unwrap())
}

async fn create(app: &Router, model: &str) -> String {
    let (s, v) = call_json(app, Method::POST, "/session", model).await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

async fn step(app: &Router, id: &str, ray: usize) -> (StatusCode, Value) {
    call_json(app, Method::POST, &format!("/session/{id}/step"), &json!({ "ray": ray }).to_string()).await
}

/// Index of the F₁ ray with the given `(K+B)`-degree.
async fn ray_with_value(app: &Router, id: &str, value: &str) -> usize {
    let (_, rays) = call_json(app, Method::GET, &format!("/session/{id}/rays"), "").await;
    let r = rays.as_array().unwrap().iter().find(|r| r["value"] == value).unwrap();
    r["index"].as_u64().unwrap() as usize
}

fn cli(args: &[&str]) -> String {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("mmp").chain(args.iter().copied());
    let code = mmp_cli::dispatch(argv, &mut std::io::empty(), &mut out, &mut err);
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    String::from_utf8(out).unwrap()
}

fn fixture_path(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn model_fan(state: &Value) -> Fan {
    serde_json::from_value(state["model"]["fan"].clone()).unwrap()
}

#[tokio::test]
async fn f1_rays_have_values_minus_one_and_minus_two() {
    let app = app();
    let id = create(&app, &fixture("f1.json")).await;
    let (s, rays) = call_json(&app, Method::GET, &format!("/session/{id}/rays"), "").await;
    assert_eq!(s, StatusCode::OK);
    let mut values: Vec<&str> = rays.as_array().unwrap().iter().map(|r| r["value"].as_str().unwrap()).collect();
    values.sort();
    assert_eq!(values, ["-1", "-2"]);
}

#[tokio::test]
async fn stepping_the_section_gives_p2() {
    let app = app();
    let id = create(&app, &fixture("f1.json")).await;
    let section = ray_with_value(&app, &id, "-1").await;
    let (s, state) = step(&app, &id, section).await;
    assert_eq!(s, StatusCode::OK, "{state}");
    assert_eq!(state["rho"], 1);
    assert_eq!(state["last_step"]["kind"], "Divisorial");
    assert!(is_isomorphic(&model_fan(&state), &p2()).unwrap());
}

#[tokio::test]
async fn stepping_the_fiber_finishes_over_p1() {
    let app = app();
    let id = create(&app, &fixture("f1.json")).await;
    let fiber = ray_with_value(&app, &id, "-2").await;
    let (s, state) = step(&app, &id, fiber).await;
    assert_eq!(s, StatusCode::OK, "{state}");
    assert_eq!(state["finished"], true);
    assert_eq!(state["final_state"], "MoriFibreSpace");
    assert_eq!(state["last_step"]["kind"], "Fibration");
    // the base has ρ = 1
    assert_eq!(state["last_step"]["rho_after"], 1);
    let (s, _) = step(&app, &id, 0).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn steps_after_a_minimal_model_conflict() {
    let app = app();
    let mut model: Value = serde_json::from_str(&fixture("p2.json")).unwrap();
    model["boundary"] = json!(["1", "1", "1"]);
    let id = create(&app, &model.to_string()).await;
    let (_, state) = call_json(&app, Method::GET, &format!("/session/{id}/report"), "").await;
    assert_eq!(state["final_state"], "MinimalModel");
    for _ in 0..2 {
        let (s, v) = step(&app, &id, 0).await;
        assert_eq!(s, StatusCode::CONFLICT, "{v}");
    }
}

#[tokio::test]
async fn unknown_sessions_are_404() {
    let app = app();
    let ghost = uuid::Uuid::new_v4();
    for uri in [format!("/session/{ghost}/rays"), "/session/not-a-uuid/trace".to_string()] {
        let (s, _) = call(&app, Method::GET, &uri, "").await;
        assert_eq!(s, StatusCode::NOT_FOUND, "{uri}");
    }
    let (s, _) = step(&app, &ghost.to_string(), 0).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, Method::DELETE, &format!("/session/{ghost}"), "").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn invalid_ray_is_409_with_candidates() {
    let app = app();
    let id = create(&app, &fixture("f1.json")).await;
    let (s, v) = step(&app, &id, 7).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["candidates"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn bad_bodies_are_400() {
    let app = app();
    let (s, v) = call_json(&app, Method::POST, "/session", r#"{"rank": 2, "rays": [[1, 0]], "max_cones": "x"}"#).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("max_cones"), "{v}");
    let id = create(&app, &fixture("f1.json")).await;
    let (s, _) = call_json(&app, Method::POST, &format!("/session/{id}/step"), r#"{"ray": "one"}"#).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn service_trace_matches_batch_cli() {
    let app = app();
    let id = create(&app, &fixture("f1.json")).await;
    for ray in [1, 0] {
        let (s, v) = step(&app, &id, ray).await;
        assert_eq!(s, StatusCode::OK, "{v}");
    }
    let (_, trace) = call(&app, Method::GET, &format!("/session/{id}/trace"), "").await;
    assert_eq!(trace, cli(&["mmp", "run", &fixture_path("f1.json"), "--choices", "1,0"]));
}

#[tokio::test]
async fn scaling_bridge_matches_batch_cli() {
    let app = app();
    let id = create(&app, &fixture("p2_blowup6.json")).await;
    let (s, v) = call_json(&app, Method::POST, &format!("/session/{id}/scale/start"), r#"{"C": "anticanonical"}"#).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    let mut choices = Vec::new();
    let mut state = v;
    while state["finished"] == false {
        let ray = state["candidates"][0]["ray_index"].as_u64().unwrap() as usize;
        choices.push(ray.to_string());
        let (s, v) = call_json(&app, Method::POST, &format!("/session/{id}/scale/choose"), &json!({ "ray": ray }).to_string()).await;
        assert_eq!(s, StatusCode::OK, "{v}");
        state = v;
    }
    let (_, trace) = call(&app, Method::GET, &format!("/session/{id}/trace"), "").await;
    let batch = cli(&["mmp", "scale", &fixture_path("p2_blowup6.json"), "--C", "anticanonical", "--choices", &choices.join(",")]);
    assert_eq!(trace, batch);
}

#[tokio::test]
async fn choose_without_scaling_conflicts() {
    let app = app();
    let id = create(&app, &fixture("f1.json")).await;
    let (s, _) = call_json(&app, Method::POST, &format!("/session/{id}/scale/choose"), r#"{"ray": 0}"#).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn sessions_are_isolated() {
    let app = app();
    let a = create(&app, &fixture("f1.json")).await;
    let b = create(&app, &fixture("f1.json")).await;
    let (_, before) = call(&app, Method::GET, &format!("/session/{b}/trace"), "").await;
    let section = ray_with_value(&app, &a, "-1").await;
    let fiber = ray_with_value(&app, &b, "-2").await;
    let ((sa, va), (sb, vb)) = tokio::join!(step(&app, &a, section), step(&app, &b, fiber));
    assert_eq!((sa, sb), (StatusCode::OK, StatusCode::OK));
    assert_eq!(va["rho"], 1);
    assert_eq!(vb["final_state"], "MoriFibreSpace");
    assert_eq!(vb["rho"], 2);
    let (_, after) = call(&app, Method::GET, &format!("/session/{b}/trace"), "").await;
    assert_ne!(before, after);
    let c = create(&app, &fixture("f1.json")).await;
    let (_, fresh) = call(&app, Method::GET, &format!("/session/{c}/trace"), "").await;
    assert_eq!(before, fresh);
}

#[tokio::test]
async fn preview_clone_matches_the_committed_step() {
    let app = app();
    for value in ["-1", "-2"] {
        let id = create(&app, &fixture("f1.json")).await;
        let ray = ray_with_value(&app, &id, value).await;
        let (s, clone) = call_json(&app, Method::POST, &format!("/session/{id}/clone"), "").await;
        assert_eq!(s, StatusCode::CREATED);
        let cid = clone["id"].as_str().unwrap().to_string();
        let (_, mut preview) = step(&app, &cid, ray).await;
        let (_, mut committed) = step(&app, &id, ray).await;
        preview["id"] = Value::Null;
        committed["id"] = Value::Null;
        assert_eq!(preview, committed);
        let (s, _) = call(&app, Method::DELETE, &format!("/session/{cid}"), "").await;
        assert_eq!(s, StatusCode::NO_CONTENT);
    }
}

#[tokio::test]
async fn clones_are_limited() {
    let app = app();
    let id = create(&app, &fixture("f1.json")).await;
    for _ in 0..CLONE_LIMIT {
        let (s, _) = call(&app, Method::POST, &format!("/session/{id}/clone"), "").await;
        assert_eq!(s, StatusCode::CREATED);
    }
    let (s, _) = call(&app, Method::POST, &format!("/session/{id}/clone"), "").await;
    assert_eq!(s, StatusCode::TOO_MANY_REQUESTS);
}

#[tokio::test]
async fn report_and_delete() {
    let app = app();
    let id = create(&app, &fixture("f2.json")).await;
    let (s, r) = call_json(&app, Method::GET, &format!("/session/{id}/report"), "").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(r["rho"], 2);
    let (s, _) = call(&app, Method::DELETE, &format!("/session/{id}"), "").await;
    assert_eq!(s, StatusCode::NO_CONTENT);
    let (s, _) = call(&app, Method::GET, &format!("/session/{id}/report"), "").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn persisted_sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(Some(dir.path().to_path_buf())).unwrap());
    let id = create(&app, &fixture("f1.json")).await;
    let (s, _) = step(&app, &id, 1).await;
    assert_eq!(s, StatusCode::OK);
    let (_, trace) = call(&app, Method::GET, &format!("/session/{id}/trace"), "").await;
    drop(app);

    let state = AppState::new(Some(dir.path().to_path_buf())).unwrap();
    assert_eq!(state.session_count(), 1);
    let app = router(state);
    let (s, restored) = call(&app, Method::GET, &format!("/session/{id}/trace"), "").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(restored, trace);
    let (s, v) = step(&app, &id, 0).await;
    assert_eq!(s, StatusCode::OK, "{v}");
}

#[tokio::test]
async fn ui_route_serves_html() {
    let app = app();
    let req = Request::builder().uri("/ui").body(Body::empty()).unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let ct = resp.headers()["content-type"].to_str().unwrap().to_string();
    assert!(ct.starts_with("text/html"), "{ct}");
}
