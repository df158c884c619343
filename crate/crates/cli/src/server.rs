//! Stateless JSON API: every request carries its construction.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Request, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use geodiscover_core::dsl::DslErrorKind;
use geodiscover_core::{
    discover, parse_dsl, DiscoveryConfig, DiscoveryError, DiscoveryReport, NumericConfig, ParsedFile,
};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::hide_points;

pub const DEFAULT_WALL_CAP: Duration = Duration::from_secs(60);

#[derive(Clone, Debug)]
pub struct AppState {
    /// Total wall time allowed for one discovery request.
    pub wall_cap: Duration,
}

impl Default for AppState {
    fn default() -> Self {
        AppState {
            wall_cap: DEFAULT_WALL_CAP,
        }
    }
}

/// DSL text, or the same steps as a list of lines.
#[derive(Deserialize, Debug)]
#[serde(untagged)]
pub enum ConstructionInput {
    Text(String),
    Steps(Vec<String>),
}

impl ConstructionInput {
    fn text(&self) -> String {
        match self {
            ConstructionInput::Text(t) => t.clone(),
            ConstructionInput::Steps(lines) => lines.join("\n"),
        }
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct EvaluateRequest {
    pub construction: ConstructionInput,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    /// Seconds per symbolic check.
    pub timeout: Option<f64>,
    pub tolerance: Option<f64>,
    pub resamples: Option<usize>,
    pub seed: Option<u64>,
    pub pin: Option<bool>,
    pub timings: Option<bool>,
    pub pruning: Option<bool>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct DiscoverRequest {
    pub construction: ConstructionInput,
    /// Point name; defaults to the construction's `discover` line.
    pub target: Option<String>,
    #[serde(default)]
    pub hide: Vec<String>,
    #[serde(default)]
    pub config: ConfigOverrides,
}

#[derive(Serialize, Debug)]
pub struct EvaluateResponse {
    pub request_hash: String,
    pub coordinates: BTreeMap<String, [f64; 2]>,
    pub hidden: Vec<String>,
}

#[derive(Serialize, Debug)]
pub struct DiscoverResponse {
    pub request_hash: String,
    #[serde(flatten)]
    pub report: DiscoveryReport,
    pub coordinates: BTreeMap<String, [f64; 2]>,
}

/// Error response body.
struct ApiError {
    status: StatusCode,
    message: String,
    position: Option<(usize, usize)>,
    hash: String,
}

impl ApiError {
    fn new(status: StatusCode, hash: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
            position: None,
            hash: hash.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message, "request_hash": self.hash });
        if let Some((line, column)) = self.position {
            body["line"] = line.into();
            body["column"] = column.into();
        }
        (self.status, Json(body)).into_response()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/evaluate", post(evaluate))
        .route("/api/discover", post(discover_handler))
        .layer(middleware::from_fn(cors))
        .with_state(state)
}

pub async fn serve(addr: &str, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

async fn cors(req: Request, next: Next) -> Response {
    let mut res = if req.method() == Method::OPTIONS {
        StatusCode::NO_CONTENT.into_response()
    } else {
        next.run(req).await
    };
    let h = res.headers_mut();
    h.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    h.insert(
        header::ACCESS_CONTROL_ALLOW_METHODS,
        HeaderValue::from_static("GET, POST, OPTIONS"),
    );
    h.insert(
        header::ACCESS_CONTROL_ALLOW_HEADERS,
        HeaderValue::from_static("content-type"),
    );
    res
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "service": "geodiscover",
        "version": env!("CARGO_PKG_VERSION"),
    }))
}

pub fn request_hash(body: &[u8]) -> String {
    hex::encode(Sha256::digest(body))
}

fn decode<T: for<'de> Deserialize<'de>>(body: &[u8], hash: &str) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, hash, format!("invalid request: {e}")))
}

fn parse(input: &ConstructionInput, hash: &str) -> Result<ParsedFile, ApiError> {
    parse_dsl(&input.text()).map_err(|e| {
        let status = match e.kind {
            DslErrorKind::Degenerate => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError {
            position: Some((e.line, e.column)),
            ..ApiError::new(status, hash, e.to_string())
        }
    })
}

fn coordinates(f: &ParsedFile) -> BTreeMap<String, [f64; 2]> {
    let c = &f.construction;
    c.coords()
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| (c.points()[i].name.clone(), [x, y]))
        .collect()
}

async fn evaluate(body: Bytes) -> Result<Json<EvaluateResponse>, ApiError> {
    let hash = request_hash(&body);
    let req: EvaluateRequest = decode(&body, &hash)?;
    let parsed = parse(&req.construction, &hash)?;
    let c = &parsed.construction;
    Ok(Json(EvaluateResponse {
        coordinates: coordinates(&parsed),
        hidden: c.hidden().iter().map(|p| c.name(*p).to_string()).collect(),
        request_hash: hash,
    }))
}

/// Raises the flag when dropped, which stops a job whose request went away.
struct CancelOnDrop(Arc<AtomicBool>);

impl Drop for CancelOnDrop {
    fn drop(&mut self) {
        self.0.store(true, Ordering::Relaxed);
    }
}

fn config_from(o: &ConfigOverrides, hash: &str) -> Result<DiscoveryConfig, ApiError> {
    let d = DiscoveryConfig::default();
    let n = NumericConfig::default();
    let timeout = match o.timeout {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                hash,
                "timeout must be positive",
            ))
        }
        Some(t) => Duration::from_secs_f64(t),
        None => d.timeout,
    };
    if o.tolerance.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            hash,
            "tolerance must be positive",
        ));
    }
    Ok(DiscoveryConfig {
        numeric: NumericConfig {
            tolerance: o.tolerance.unwrap_or(n.tolerance),
            resamples: o.resamples.unwrap_or(n.resamples),
            seed: o.seed.unwrap_or(n.seed),
        },
        timeout,
        pin: o.pin.unwrap_or(d.pin),
        pruning: o.pruning.unwrap_or(d.pruning),
        timings: o.timings.unwrap_or(d.timings),
        ..d
    })
}

async fn discover_handler(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Json<DiscoverResponse>, ApiError> {
    let hash = request_hash(&body);
    let req: DiscoverRequest = decode(&body, &hash)?;
    let mut parsed = parse(&req.construction, &hash)?;
    hide_points(&mut parsed.construction, &req.hide)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, &hash, e))?;
    let target = match &req.target {
        Some(name) => parsed.construction.find(name).ok_or_else(|| {
            ApiError::new(StatusCode::BAD_REQUEST, &hash, format!("unknown point `{name}`"))
        })?,
        None => parsed
            .target()
            .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, &hash, "no target given"))?,
    };
    let flag = Arc::new(AtomicBool::new(false));
    let config = DiscoveryConfig {
        cancel: Some(flag.clone()),
        ..config_from(&req.config, &hash)?
    };
    // dropped with this future, either at the cap or when the client disconnects
    let _guard = CancelOnDrop(flag);
    let c = parsed.construction.clone();
    let job = tokio::task::spawn_blocking(move || discover(&c, target, &config));
    let report = match tokio::time::timeout(state.wall_cap, job).await {
        Err(_) => {
            return Err(ApiError::new(
                StatusCode::REQUEST_TIMEOUT,
                &hash,
                format!(
                    "discovery exceeded the {} s wall-time cap",
                    state.wall_cap.as_secs_f64()
                ),
            ))
        }
        Ok(Err(join)) => {
            return Err(ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                &hash,
                join.to_string(),
            ))
        }
        Ok(Ok(Err(e))) => {
            let status = match e {
                DiscoveryError::UnknownTarget(_) => StatusCode::BAD_REQUEST,
                DiscoveryError::DegenerateConstruction(_) => StatusCode::UNPROCESSABLE_ENTITY,
                DiscoveryError::Cancelled => StatusCode::REQUEST_TIMEOUT,
                DiscoveryError::Algebra(_) => StatusCode::INTERNAL_SERVER_ERROR,
            };
            return Err(ApiError::new(status, &hash, e.to_string()));
        }
        Ok(Ok(Ok(report))) => report,
    };
    Ok(Json(DiscoverResponse {
        request_hash: hash,
        coordinates: coordinates(&parsed),
        report,
    }))
}
