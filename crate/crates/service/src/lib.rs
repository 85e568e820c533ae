//! Stateless HTTP API: solve scenarios, simulate policies, browse presets.
//!
//! Every response body is JSON and carries `schema_version`.

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Path};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

use oncodp_core::oracle::{derive_seed, monte_carlo_value, simulate_trajectory, TrajectoryRecord};
use oncodp_core::scenario_io::{
    catalog, from_json, preset_document, ScenarioDocument, ScenarioIoError, SolutionDocument, SCHEMA_VERSION,
};
use oncodp_core::{solve, Scenario, State};

pub const MAX_BODY_BYTES: usize = 1 << 20;
pub const MAX_SAMPLES: u64 = 1_000_000;
pub const MAX_SAMPLE_TRAJECTORIES: usize = 10;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Origin allowed by CORS; `None` disables the CORS layer.
    pub cors_origin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, detail: impl Into<String>, path: Option<String>) -> Self {
        ApiError {
            status,
            code,
            detail: detail.into(),
            path,
        }
    }

    fn invalid(detail: impl Into<String>, path: &str) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "validation_error", detail, Some(path.into()))
    }

    /// Maps a scenario error, prefixing its path with `base` when the
    /// document sits inside a larger body.
    fn from_io(err: ScenarioIoError, base: &str) -> Self {
        let path = err.path().map(|p| format!("{base}{p}"));
        match err {
            ScenarioIoError::Parse { .. } => Self::new(StatusCode::BAD_REQUEST, "parse_error", err.to_string(), path),
            ScenarioIoError::Validation(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "validation_error", err.to_string(), path)
            }
            ScenarioIoError::UnknownPreset(_) => Self::new(StatusCode::NOT_FOUND, "unknown_preset", err.to_string(), None),
        }
    }

    fn internal(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal_error", detail, None)
    }
}

impl From<BytesRejection> for ApiError {
    fn from(rejection: BytesRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_body", rejection.body_text(), None)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = serde_json::to_value(&self).expect("errors always serialize");
        body["schema_version"] = json!(SCHEMA_VERSION);
        body["status"] = json!(self.status.as_u16());
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub scenario: ScenarioDocument,
    pub start: State,
    pub n: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateResponse {
    pub schema_version: &'static str,
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub single_sample: bool,
    pub v1: f64,
    pub sample_trajectories: Vec<TrajectoryRecord>,
}

pub fn router(config: &ServiceConfig) -> Router {
    let api = Router::new()
        .route("/api/v1/solve", post(solve_handler))
        .route("/api/v1/simulate", post(simulate_handler))
        .route("/api/v1/presets", get(presets_handler))
        .route("/api/v1/presets/{name}", get(preset_handler))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES));
    match &config.cors_origin {
        Some(origin) => api.layer(cors_layer(origin)),
        None => api,
    }
}

fn cors_layer(origin: &str) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    if origin == "*" {
        layer.allow_origin(Any)
    } else {
        match HeaderValue::from_str(origin) {
            Ok(value) => layer.allow_origin(value),
            Err(_) => layer,
        }
    }
}

fn body_text(body: &Bytes) -> Result<&str, ApiError> {
    std::str::from_utf8(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "parse_error", e.to_string(), None))
}

fn scenario_from(doc: &ScenarioDocument, base: &str) -> Result<Scenario, ApiError> {
    doc.check_schema_version().map_err(|e| ApiError::from_io(e, base))?;
    doc.to_scenario().map_err(|e| ApiError::from_io(e, base))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

fn json_text(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

async fn solve_handler(body: Result<Bytes, BytesRejection>) -> Result<Response, ApiError> {
    let body = body?;
    let doc: ScenarioDocument = from_json(body_text(&body)?).map_err(|e| ApiError::from_io(e, ""))?;
    let scenario = scenario_from(&doc, "")?;
    let text = blocking(move || {
        let solution = solve(&scenario).map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(SolutionDocument::from_solution(&solution).to_canonical_string())
    })
    .await?;
    Ok(json_text(text))
}

async fn simulate_handler(body: Result<Bytes, BytesRejection>) -> Result<Response, ApiError> {
    let body = body?;
    let req: SimulateRequest = from_json(body_text(&body)?).map_err(|e| ApiError::from_io(e, ""))?;
    let scenario = scenario_from(&req.scenario, "/scenario")?;
    if req.n == 0 || req.n > MAX_SAMPLES {
        return Err(ApiError::invalid(format!("n must be between 1 and {MAX_SAMPLES}"), "/n"));
    }
    scenario
        .space()
        .check(&req.start)
        .map_err(|e| ApiError::invalid(format!("invalid start: {e}"), "/start"))?;

    let response = blocking(move || {
        let solution = solve(&scenario).map_err(|e| ApiError::internal(e.to_string()))?;
        let n = req.n as usize;
        let est = monte_carlo_value(&scenario, &solution, req.start, n, req.seed)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        let sample_trajectories = (0..n.min(MAX_SAMPLE_TRAJECTORIES))
            .map(|i| simulate_trajectory(&scenario, &solution, req.start, derive_seed(req.seed, i as u64)))
            .collect::<Result<_, _>>()
            .map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(SimulateResponse {
            schema_version: SCHEMA_VERSION,
            mean: est.mean,
            std_error: est.std_error,
            n: est.n,
            single_sample: est.single_sample,
            v1: solution.value(1, &req.start),
            sample_trajectories,
        })
    })
    .await?;
    Ok(Json(response).into_response())
}

async fn presets_handler() -> Json<Value> {
    Json(json!({ "schema_version": SCHEMA_VERSION, "presets": catalog() }))
}

async fn preset_handler(Path(name): Path<String>) -> Result<Json<ScenarioDocument>, ApiError> {
    preset_document(&name).map(Json).map_err(|e| ApiError::from_io(e, ""))
}
