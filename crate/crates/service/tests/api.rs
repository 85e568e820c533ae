use axum::body::{to_bytes, Body, Bytes};
use axum::http::{Method, Request, StatusCode};
use serde_json::{json, Value};
use tower::ServiceExt;

use oncodp_core::scenario_io::{preset_document, ScenarioDocument};
use oncodp_service::{router, ServiceConfig, MAX_BODY_BYTES};

async fn call(method: Method, uri: &str, body: Option<String>) -> (StatusCode, Bytes) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let response = router(&ServiceConfig::default()).oneshot(request).await.unwrap();
    let status = response.status();
    (status, to_bytes(response.into_body(), usize::MAX).await.unwrap())
}

async fn post(uri: &str, body: &Value) -> (StatusCode, Value) {
    let (status, bytes) = call(Method::POST, uri, Some(body.to_string())).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn get(uri: &str) -> (StatusCode, Value) {
    let (status, bytes) = call(Method::GET, uri, None).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn base() -> Value {
    serde_json::to_value(preset_document("base").unwrap()).unwrap()
}

fn tiny() -> Value {
    let mut doc: ScenarioDocument = preset_document("base").unwrap();
    doc.scenario.horizon = 1;
    doc.scenario.m = 2;
    doc.scenario.n = 2;
    serde_json::to_value(doc).unwrap()
}

fn entry(solution: &Value, t: u64, h: u64, phi: u64, tau: u64) -> &Value {
    solution["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["t"] == t && e["h"] == h && e["phi"] == phi && e["tau"] == tau)
        .expect("entry present")
}

#[tokio::test]
async fn solve_base_reaches_full_terminal_value() {
    let (status, body) = post("/api/v1/solve", &base()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["schema_version"], "1");
    assert_eq!(entry(&body, 4, 0, 0, 0)["V"], 100.0);
}

#[tokio::test]
async fn solve_tiny_instance() {
    let (status, body) = post("/api/v1/solve", &tiny()).await;
    assert_eq!(status, StatusCode::OK);
    let e = entry(&body, 1, 0, 0, 1);
    assert!((e["V"].as_f64().unwrap() - 90.0).abs() < 1e-12);
    assert_eq!(e["action"], "M2");
}

#[tokio::test]
async fn negative_probability_is_422_with_path() {
    let mut doc = base();
    doc["scenario"]["actions"][0]["phi_row"] = json!([0.0, 1.2, -0.2]);
    let (status, body) = post("/api/v1/solve", &doc).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["path"], "/scenario/actions/0/phi_row/2");
    assert_eq!(body["code"], "validation_error");
    assert_eq!(body["status"], 422);
    assert_eq!(body["schema_version"], "1");
}

#[tokio::test]
async fn malformed_body_is_400() {
    let (status, bytes) = call(Method::POST, "/api/v1/solve", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let body: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(body["code"], "parse_error");

    let mut doc = base();
    doc["scenario"].as_object_mut().unwrap().remove("horizon");
    let (status, body) = post("/api/v1/solve", &doc).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["path"], "/scenario/horizon");
}

#[tokio::test]
async fn oversized_body_is_rejected() {
    let padding = "x".repeat(MAX_BODY_BYTES + 1);
    let mut doc = base();
    doc["metadata"]["description"] = json!(padding);
    let (status, bytes) = call(Method::POST, "/api/v1/solve", Some(doc.to_string())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let body: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(body["code"], "bad_body");
}

fn simulate_body(start: Value, n: u64, seed: u64) -> Value {
    json!({ "scenario": base(), "start": start, "n": n, "seed": seed })
}

#[tokio::test]
async fn simulate_from_death_state_has_zero_error() {
    let (status, body) = post("/api/v1/simulate", &simulate_body(json!({"h": 0, "phi": 10, "tau": 3}), 500, 7)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["std_error"], 0.0);
    assert_eq!(body["mean"], body["v1"]);
    assert_eq!(body["n"], 500);
    assert_eq!(body["sample_trajectories"].as_array().unwrap().len(), 10);
}

#[tokio::test]
async fn simulate_is_deterministic_per_seed() {
    let req = simulate_body(json!({"h": 0, "phi": 4, "tau": 5}), 2000, 99).to_string();
    let (s1, a) = call(Method::POST, "/api/v1/simulate", Some(req.clone())).await;
    let (s2, b) = call(Method::POST, "/api/v1/simulate", Some(req)).await;
    assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(a, b);

    let body: Value = serde_json::from_slice(&a).unwrap();
    let (mean, se, v1) = (
        body["mean"].as_f64().unwrap(),
        body["std_error"].as_f64().unwrap(),
        body["v1"].as_f64().unwrap(),
    );
    assert!(se > 0.0);
    assert!((mean - v1).abs() <= 4.0 * se, "mean {mean} v1 {v1} se {se}");
}

#[tokio::test]
async fn simulate_caps_sample_count() {
    let (status, body) = post("/api/v1/simulate", &simulate_body(json!({"h": 0, "phi": 1, "tau": 1}), 10_000_000, 0)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["path"], "/n");

    let (status, _) = post("/api/v1/simulate", &simulate_body(json!({"h": 0, "phi": 1, "tau": 1}), 0, 0)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn simulate_rejects_bad_start_and_scenario() {
    let (status, body) = post("/api/v1/simulate", &simulate_body(json!({"h": 0, "phi": 11, "tau": 1}), 10, 0)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["path"], "/start");

    let mut req = simulate_body(json!({"h": 0, "phi": 1, "tau": 1}), 10, 0);
    req["scenario"]["scenario"]["actions"][0]["phi_row"] = json!([0.0, 1.2, -0.2]);
    let (status, body) = post("/api/v1/simulate", &req).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["path"], "/scenario/scenario/actions/0/phi_row/2");
}

#[tokio::test]
async fn presets_catalog_and_documents() {
    let (status, body) = get("/api/v1/presets").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["schema_version"], "1");
    let names: Vec<&str> = body["presets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(names.len(), 11);
    assert!(names.contains(&"base") && names.contains(&"table5-four-actions"));

    let (status, doc) = get("/api/v1/presets/base").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["schema_version"], "1");
    let m3 = &doc["scenario"]["actions"][2];
    assert_eq!(m3["name"], "M3");
    assert_eq!(m3["tau_row"], json!([0.0, 0.3, 0.7]));
    assert_eq!(doc, base());
}

#[tokio::test]
async fn unknown_preset_is_404() {
    let (status, body) = get("/api/v1/presets/zzz").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "unknown_preset");
    assert_eq!(body["status"], 404);
}

#[tokio::test]
async fn cors_origin_is_echoed() {
    let app = router(&ServiceConfig {
        cors_origin: Some("http://localhost:5173".into()),
    });
    let request = Request::builder()
        .uri("/api/v1/presets")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let response = app.oneshot(request).await.unwrap();
    assert_eq!(
        response.headers()["access-control-allow-origin"],
        "http://localhost:5173"
    );
}
