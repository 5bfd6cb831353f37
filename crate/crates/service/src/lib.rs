//! HTTP JSON API over [`Assistant`].
//!
//! Routes: `POST /completion`, `GET /examples`, `GET /schema`,
//! `GET /metadata/status`, `GET /health`. Every error body has the shape
//! `{"error": {"code": ..., "message": ...}}`.

pub mod body;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use sparql_assist_core::assistant::{AssistError, Assistant};
use sparql_assist_core::client::ClientError;
use sparql_assist_core::config::{ConfigError, ServiceConfig};
use sparql_assist_core::schema_graph::ExportFormat;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid CORS origin {0:?}")]
    Origin(String),
    #[error("cannot listen: {0}")]
    Io(#[from] std::io::Error),
}

/// Shared state. The assistant is set once the cache layer is built;
/// until then `/health` answers 503 and other routes refuse work.
#[derive(Default)]
pub struct AppState {
    assistant: OnceLock<Arc<Assistant>>,
}

impl AppState {
    pub fn starting() -> Arc<Self> {
        Arc::new(AppState::default())
    }

    pub fn ready(assistant: Arc<Assistant>) -> Arc<Self> {
        let state = Self::starting();
        state.set_assistant(assistant);
        state
    }

    /// Returns false if an assistant was already set.
    pub fn set_assistant(&self, assistant: Arc<Assistant>) -> bool {
        self.assistant.set(assistant).is_ok()
    }

    fn assistant(&self) -> Result<&Arc<Assistant>, ApiError> {
        self.assistant.get().ok_or_else(|| {
            ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "starting", "the metadata cache is not ready yet")
        })
    }
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }
}

impl From<AssistError> for ApiError {
    fn from(e: AssistError) -> Self {
        match e {
            AssistError::Endpoint(ClientError::InvalidEndpoint { .. }) => {
                ApiError::bad_request("invalid_endpoint", e.to_string())
            }
            AssistError::Position(_) | AssistError::LineColumn(_) => {
                ApiError::bad_request("invalid_position", e.to_string())
            }
            AssistError::Endpoint(_) | AssistError::Unavailable { .. } => {
                ApiError::new(StatusCode::BAD_GATEWAY, "upstream_unavailable", e.to_string())
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json(self.status, body::error(self.code, &self.message))
    }
}

fn json(status: StatusCode, text: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], text).into_response()
}

fn required(value: Option<String>, name: &str) -> Result<String, ApiError> {
    match value {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(ApiError::bad_request("missing_parameter", format!("query parameter `{name}` is required"))),
    }
}

fn query_params<T>(params: Result<Query<T>, axum::extract::rejection::QueryRejection>) -> Result<T, ApiError> {
    params.map(|Query(p)| p).map_err(|e| ApiError::bad_request("bad_request", e.body_text()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompletionRequest {
    endpoint: String,
    query: String,
    line: u32,
    column: u32,
}

async fn completion(State(state): State<Arc<AppState>>, payload: Bytes) -> Result<Response, ApiError> {
    let request: CompletionRequest = serde_json::from_slice(&payload)
        .map_err(|e| ApiError::bad_request("bad_request", format!("malformed request body: {e}")))?;
    let assistant = state.assistant()?;
    let list = assistant.complete_at(&request.endpoint, &request.query, request.line, request.column).await?;
    Ok(json(StatusCode::OK, body::completion(&list)))
}

#[derive(Deserialize)]
struct ExamplesParams {
    endpoint: Option<String>,
    q: Option<String>,
}

async fn examples(
    State(state): State<Arc<AppState>>,
    params: Result<Query<ExamplesParams>, axum::extract::rejection::QueryRejection>,
) -> Result<Response, ApiError> {
    let params = query_params(params)?;
    let endpoint = required(params.endpoint, "endpoint")?;
    let filter = params.q.filter(|q| !q.is_empty());
    let list = state.assistant()?.examples(&endpoint, filter.as_deref()).await?;
    Ok(json(StatusCode::OK, body::examples(&list)))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct SchemaParams {
    endpoint: Option<String>,
    format: Option<String>,
    min_count: Option<String>,
}

async fn schema(
    State(state): State<Arc<AppState>>,
    params: Result<Query<SchemaParams>, axum::extract::rejection::QueryRejection>,
) -> Result<Response, ApiError> {
    let params = query_params(params)?;
    let endpoint = required(params.endpoint, "endpoint")?;
    let format: ExportFormat = match params.format.as_deref() {
        None => ExportFormat::Json,
        Some(name) => name.parse().map_err(|_| {
            ApiError::bad_request("unknown_format", format!("unknown format {name:?}; expected json, dot or mermaid"))
        })?,
    };
    let min_count = match params.min_count.as_deref() {
        None => 0,
        Some(n) => n.parse::<u64>().map_err(|_| {
            ApiError::bad_request("bad_request", format!("minCount must be a non-negative integer, got {n:?}"))
        })?,
    };
    let assistant = state.assistant()?;
    let graph = assistant.schema_graph(&endpoint, min_count).await?;
    let text = body::schema(&graph, format, assistant.well_known());
    Ok((StatusCode::OK, [(header::CONTENT_TYPE, body::schema_content_type(format))], text).into_response())
}

#[derive(Deserialize)]
struct StatusParams {
    endpoint: Option<String>,
}

async fn metadata_status(
    State(state): State<Arc<AppState>>,
    params: Result<Query<StatusParams>, axum::extract::rejection::QueryRejection>,
) -> Result<Response, ApiError> {
    let endpoint = required(query_params(params)?.endpoint, "endpoint")?;
    Ok(json(StatusCode::OK, body::status(&state.assistant()?.status(&endpoint))))
}

async fn health(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    state.assistant()?;
    Ok(json(StatusCode::OK, "{\"status\":\"ok\"}\n".into()))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route")
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed", "method not allowed on this route")
}

fn cors(origins: &[String]) -> Result<CorsLayer, ServiceError> {
    let layer = CorsLayer::new().allow_methods([Method::GET, Method::POST]).allow_headers([header::CONTENT_TYPE]);
    if origins.iter().any(|o| o == "*") {
        return Ok(layer.allow_origin(Any));
    }
    let list = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|_| ServiceError::Origin(o.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(layer.allow_origin(AllowOrigin::list(list)))
}

pub fn router(state: Arc<AppState>, cors_allow_origins: &[String]) -> Result<Router, ServiceError> {
    Ok(Router::new()
        .route("/completion", post(completion))
        .route("/examples", get(examples))
        .route("/schema", get(schema))
        .route("/metadata/status", get(metadata_status))
        .route("/health", get(health))
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed)
        .layer(cors(cors_allow_origins)?)
        .with_state(state))
}

/// Address from the config's `bind` and `port`.
pub fn listen_addr(config: &ServiceConfig) -> Result<SocketAddr, ServiceError> {
    let ip = config
        .bind
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("bind address {:?} is not an IP address", config.bind)))?;
    Ok(SocketAddr::new(ip, config.port))
}

/// Serves on `listener` until `shutdown` resolves. The listener accepts
/// connections before the assistant exists, so early health checks see 503.
pub async fn serve(
    config: &ServiceConfig,
    listener: TcpListener,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    config.validate()?;
    let state = AppState::starting();
    let app = router(state.clone(), &config.cors_allow_origins)?;
    let server = tokio::spawn(async move { axum::serve(listener, app).with_graceful_shutdown(shutdown).await });
    match Assistant::from_config(config) {
        Ok(assistant) => state.set_assistant(Arc::new(assistant)),
        Err(e) => {
            server.abort();
            return Err(e.into());
        }
    };
    tracing::info!("ready");
    match server.await {
        Ok(result) => Ok(result?),
        Err(e) => Err(ServiceError::Io(std::io::Error::other(e))),
    }
}
