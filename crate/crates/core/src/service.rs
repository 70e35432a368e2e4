//! HTTP prediction service over an immutable set of loaded diagrams.
//!
//! * `GET /models` lists the loaded models.
//! * `GET /features/{feature_set}` returns a manifest.
//! * `POST /predict` scores a partial feature map.
//!
//! Every response body carries `schema_version`.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Request, State};
use axum::http::StatusCode;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::cohort::{FeatureSet, BUILTIN_FEATURE_SETS};
use crate::model::Document;
use crate::mvdd::{Metadata, Mvdd};
use crate::predict::{predict_request, PredictError, PredictRequest};
use crate::{Outcome, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot read model directory {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    BadModel { path: String, message: String },
    #[error("two models for ({feature_set}, {outcome})")]
    DuplicateModel { feature_set: String, outcome: Outcome },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub feature_set: String,
    pub outcome: Outcome,
    pub k: usize,
    pub has_or_edges: bool,
    pub metadata: Metadata,
    pub source: String,
}

/// Models and manifests, fixed at startup.
#[derive(Debug, Default)]
pub struct ServiceState {
    models: BTreeMap<(String, Outcome), (Document, CatalogEntry)>,
    feature_sets: BTreeMap<String, FeatureSet>,
}

impl ServiceState {
    pub fn new() -> Self {
        let feature_sets = BUILTIN_FEATURE_SETS
            .iter()
            .map(|n| (n.to_string(), FeatureSet::builtin(n).expect("built-in set")))
            .collect();
        ServiceState { models: BTreeMap::new(), feature_sets }
    }

    pub fn add_feature_set(&mut self, set: FeatureSet) {
        self.feature_sets.insert(set.name.clone(), set);
    }

    /// Registers a validated diagram; its feature set must already be known.
    pub fn add_model(&mut self, model: Mvdd, source: &str) -> Result<(), ServiceError> {
        let bad = |message: String| ServiceError::BadModel { path: source.to_string(), message };
        let report = model.validate();
        if !report.is_valid() {
            return Err(bad(report.to_string()));
        }
        if !self.feature_sets.contains_key(&model.feature_set) {
            return Err(bad(format!("unknown feature set `{}`", model.feature_set)));
        }
        let key = (model.feature_set.clone(), model.outcome);
        if self.models.contains_key(&key) {
            return Err(ServiceError::DuplicateModel { feature_set: key.0, outcome: key.1 });
        }
        let entry = CatalogEntry {
            feature_set: model.feature_set.clone(),
            outcome: model.outcome,
            k: model.k,
            has_or_edges: model.has_or_edges(),
            metadata: model.metadata.clone(),
            source: source.to_string(),
        };
        self.models.insert(key, (Document::Mvdd(model), entry));
        Ok(())
    }

    /// Loads `*.toml` manifests, then every diagram document among `*.json`
    /// files, in file-name order. Other document kinds are skipped.
    pub fn load_dir(dir: &Path) -> Result<Self, ServiceError> {
        let io = |e: std::io::Error| ServiceError::Io { path: dir.display().to_string(), message: e.to_string() };
        let mut paths: Vec<_> = std::fs::read_dir(dir).map_err(io)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
        paths.sort();
        let mut state = ServiceState::new();
        let name = |p: &Path| p.display().to_string();
        for p in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "toml")) {
            let set = FeatureSet::load(p).map_err(|e| ServiceError::BadModel { path: name(p), message: e.to_string() })?;
            state.add_feature_set(set);
        }
        for p in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "json")) {
            match Document::load(p) {
                Ok(Document::Mvdd(m)) => state.add_model(m, &name(p))?,
                Ok(other) => tracing::info!(path = %name(p), kind = other.kind(), "skipping non-diagram document"),
                Err(e) => return Err(ServiceError::BadModel { path: name(p), message: e.to_string() }),
            }
        }
        Ok(state)
    }

    pub fn catalog(&self) -> Vec<&CatalogEntry> {
        self.models.values().map(|(_, e)| e).collect()
    }
}

/// Model key recorded by handlers for the access log.
#[derive(Clone)]
struct ModelTag(String);

fn reply(status: StatusCode, body: serde_json::Value) -> Response {
    (status, Json(body)).into_response()
}

fn error(status: StatusCode, message: String, extra: serde_json::Value) -> Response {
    let mut body = json!({ "schema_version": SCHEMA_VERSION, "error": message });
    if let (Some(b), Some(e)) = (body.as_object_mut(), extra.as_object()) {
        b.extend(e.clone());
    }
    reply(status, body)
}

async fn models(State(state): State<Arc<ServiceState>>) -> Response {
    reply(StatusCode::OK, json!({ "schema_version": SCHEMA_VERSION, "models": state.catalog() }))
}

async fn features(State(state): State<Arc<ServiceState>>, UrlPath(name): UrlPath<String>) -> Response {
    match state.feature_sets.get(&name) {
        Some(set) => reply(
            StatusCode::OK,
            json!({ "schema_version": SCHEMA_VERSION, "feature_set": set.name, "features": set.features }),
        ),
        None => error(StatusCode::NOT_FOUND, format!("unknown feature set `{name}`"), json!({})),
    }
}

async fn predict(State(state): State<Arc<ServiceState>>, body: Bytes) -> Response {
    let request: PredictRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, format!("malformed request: {e}"), json!({})),
    };
    let tag = ModelTag(format!("{}/{}", request.feature_set, request.outcome));
    let mut response = match state.models.get(&(request.feature_set.clone(), request.outcome)) {
        None => error(
            StatusCode::NOT_FOUND,
            format!("no model for feature set `{}` and outcome `{}`", request.feature_set, request.outcome),
            json!({}),
        ),
        Some((doc, _)) => {
            let set = &state.feature_sets[&request.feature_set];
            match predict_request(doc, set, &request.values) {
                Ok(r) => reply(StatusCode::OK, serde_json::to_value(r).expect("responses serialize")),
                Err(PredictError::Indeterminate { features }) => error(
                    StatusCode::CONFLICT,
                    format!("cannot score: no value for any of {}", features.join(", ")),
                    json!({ "missing_features": features }),
                ),
                Err(e) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string(), json!({})),
            }
        }
    };
    response.extensions_mut().insert(tag);
    response
}

async fn access_log(request: Request, next: Next) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_string();
    let start = Instant::now();
    let response = next.run(request).await;
    let model = response.extensions().get::<ModelTag>().map_or("-".to_string(), |t| t.0.clone());
    tracing::info!(
        target: "access",
        %method,
        path,
        model,
        status = response.status().as_u16(),
        latency_us = start.elapsed().as_micros() as u64,
    );
    response
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/models", get(models))
        .route("/features/{feature_set}", get(features))
        .route("/predict", post(predict))
        .layer(middleware::from_fn(access_log))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, state: ServiceState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, models = state.models.len(), "listening");
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
