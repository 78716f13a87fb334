//! JSON-over-HTTP service. Every handler delegates to `meltmap::api`, the
//! same functions the command line calls.

use std::borrow::Cow;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::multipart::MultipartError;
use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, FromRequest, Multipart, Path, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use meltmap::api::{self, FitOutcome, FitRequest, ModelInfo, PredictRequest, SweepRequest};
use meltmap::dataset::parse_csv;
use meltmap::polyfit::{feature_importance, SymbolicEquation};
use meltmap::zoo::{self, POWER_ENVELOPE, VELOCITY_ENVELOPE};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tower_http::services::ServeDir;

/// Request bodies above this size get 413.
pub const DEFAULT_MAX_BODY_BYTES: usize = 16 * 1024 * 1024;

#[derive(Clone, Debug)]
pub struct ServerConfig {
    pub max_body_bytes: usize,
    /// Directory of static UI assets served at `/`.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig { max_body_bytes: DEFAULT_MAX_BODY_BYTES, ui_dir: None }
    }
}

/// Equations published by `POST /fit`. Entries are immutable once inserted.
#[derive(Default)]
struct AppState {
    fitted: RwLock<HashMap<String, Arc<SymbolicEquation>>>,
}

impl AppState {
    fn fitted(&self, id: &str) -> Option<Arc<SymbolicEquation>> {
        self.fitted.read().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }

    fn lookup<'a>(&self, id: &str) -> Option<Cow<'a, SymbolicEquation>> {
        self.fitted(id).map(|eq| Cow::Owned((*eq).clone()))
    }
}

pub fn router(config: ServerConfig) -> Router {
    let state = Arc::new(AppState::default());
    let app = Router::new()
        .route("/models", get(models))
        .route("/predict", post(predict))
        .route("/sweep", post(sweep))
        .route("/fit", post(fit))
        .route("/equations/{id}", get(equation))
        .route("/equations/{id}/importance", get(importance))
        .layer(DefaultBodyLimit::max(config.max_body_bytes))
        .with_state(state);
    match config.ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(|| async {
            ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route")
        }),
    }
}

pub async fn serve(listener: tokio::net::TcpListener, config: ServerConfig) -> std::io::Result<()> {
    axum::serve(listener, router(config)).await
}

/// Error body: `{"error": {"code": ..., "message": ...}}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }
}

impl From<meltmap::Error> for ApiError {
    fn from(e: meltmap::Error) -> Self {
        let status = match e {
            meltmap::Error::UnknownModel { .. } => StatusCode::NOT_FOUND,
            meltmap::Error::TooLarge(_) => StatusCode::PAYLOAD_TOO_LARGE,
            meltmap::Error::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        let (status, code) = match r.status() {
            StatusCode::PAYLOAD_TOO_LARGE => (StatusCode::PAYLOAD_TOO_LARGE, "too_large"),
            StatusCode::UNSUPPORTED_MEDIA_TYPE => (StatusCode::UNSUPPORTED_MEDIA_TYPE, "unsupported_media_type"),
            _ => (StatusCode::BAD_REQUEST, "invalid_json"),
        };
        ApiError::new(status, code, r.body_text())
    }
}

impl From<MultipartError> for ApiError {
    fn from(e: MultipartError) -> Self {
        match e.status() {
            StatusCode::PAYLOAD_TOO_LARGE => ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "too_large", e.body_text()),
            _ => ApiError::new(StatusCode::BAD_REQUEST, "invalid_multipart", e.body_text()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

/// `Json` whose rejections use the service's error body.
pub struct ApiJson<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for ApiJson<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        let Json(v) = Json::<T>::from_request(req, state).await?;
        Ok(ApiJson(v))
    }
}

/// Pre-serialised JSON body.
fn json_text(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> meltmap::Result<T> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

#[derive(Serialize)]
struct Envelope {
    power: [f64; 2],
    velocity: [f64; 2],
}

#[derive(Serialize)]
struct ModelsResponse {
    envelope: Envelope,
    models: Vec<ModelInfo>,
}

async fn models() -> Json<ModelsResponse> {
    Json(ModelsResponse {
        envelope: Envelope {
            power: [POWER_ENVELOPE.0, POWER_ENVELOPE.1],
            velocity: [VELOCITY_ENVELOPE.0, VELOCITY_ENVELOPE.1],
        },
        models: api::model_infos(),
    })
}

async fn predict(
    State(state): State<Arc<AppState>>,
    ApiJson(req): ApiJson<PredictRequest>,
) -> Result<Response, ApiError> {
    let resp = api::predict_with(&req, &|id| state.lookup(id))?;
    Ok(Json(resp).into_response())
}

async fn sweep(
    State(state): State<Arc<AppState>>,
    ApiJson(req): ApiJson<SweepRequest>,
) -> Result<Response, ApiError> {
    let body = blocking(move || api::sweep_with(&req, &|id| state.lookup(id)).map(|g| api::sweep_json(&g))).await?;
    Ok(json_text(body))
}

fn resolve(state: &AppState, id: &str) -> Result<Arc<SymbolicEquation>, ApiError> {
    match zoo::get(id) {
        Ok(entry) => Ok(Arc::new(entry.equation.clone())),
        Err(err) => state.fitted(id).ok_or_else(|| err.into()),
    }
}

async fn equation(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(json_text(resolve(&state, &id)?.to_json()))
}

async fn importance(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let report = feature_importance(resolve(&state, &id)?.as_ref())?;
    Ok(Json(report).into_response())
}

#[derive(Serialize)]
struct FitResponse {
    id: String,
    #[serde(flatten)]
    outcome: FitOutcome,
}

/// Multipart fields: `file` (dataset CSV, required), `target` (required),
/// `inputs`, `degree`, `test_fraction`, `seed`.
async fn fit(State(state): State<Arc<AppState>>, mut form: Multipart) -> Result<Response, ApiError> {
    let mut csv = None;
    let mut fields: HashMap<String, String> = HashMap::new();
    while let Some(field) = form.next_field().await? {
        let name = field.name().unwrap_or_default().to_string();
        let text = field.text().await?;
        if name == "file" {
            csv = Some(text);
        } else {
            fields.insert(name, text);
        }
    }
    let csv = csv.ok_or_else(|| ApiError::bad_request("missing multipart field `file`"))?;
    let req = fit_request(fields)?;

    let outcome = blocking(move || {
        let ds = parse_csv(&csv, "upload")?;
        api::fit(&ds, &req)
    })
    .await?;

    // Same content, same id: refitting identical data republishes an equal value.
    let json = outcome.equation.to_json();
    let mut h = DefaultHasher::new();
    json.hash(&mut h);
    let id = format!("fit-{:016x}", h.finish());
    state
        .fitted
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(id.clone(), Arc::new(outcome.equation.clone()));
    Ok((StatusCode::CREATED, Json(FitResponse { id, outcome })).into_response())
}

fn fit_request(mut fields: HashMap<String, String>) -> Result<FitRequest, ApiError> {
    let target = fields.remove("target").ok_or_else(|| ApiError::bad_request("missing multipart field `target`"))?;
    let mut req = FitRequest::new(target.trim());
    if let Some(v) = fields.remove("inputs") {
        req.inputs = v.trim().to_string();
    }
    if let Some(v) = fields.remove("degree") {
        req.degree = v.parse()?;
    }
    if let Some(v) = fields.remove("test_fraction") {
        req.test_fraction =
            v.trim().parse().map_err(|_| ApiError::bad_request(format!("test_fraction `{v}` is not a number")))?;
    }
    if let Some(v) = fields.remove("seed") {
        req.seed = v.trim().parse().map_err(|_| ApiError::bad_request(format!("seed `{v}` is not an integer")))?;
    }
    if let Some(extra) = fields.keys().next() {
        return Err(ApiError::bad_request(format!("unknown multipart field `{extra}`")));
    }
    Ok(req)
}
