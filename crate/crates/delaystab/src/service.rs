//! Stateless JSON service over the same handlers as the CLI.

use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};

use crate::jobs::{self, Failure, FailureKind, JobRequest, Mode};
use delaystab_core::export::SCHEMA_VERSION;

pub fn router() -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/check", post(check))
        .route("/api/region", post(|body| handle(Mode::Region, body)))
        .route("/api/sweep", post(|body| handle(Mode::Sweep, body)))
        .route("/api/verify", post(|body| handle(Mode::Verify, body)))
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "schema_version": SCHEMA_VERSION }))
}

/// A check with a `grid` (or `"mode": "zones"`) returns the zone scan.
async fn check(body: Result<Json<JobRequest>, JsonRejection>) -> Response {
    let mode = match &body {
        Ok(Json(req)) if req.grid.is_some() || req.mode == Some(Mode::Zones) => Mode::Zones,
        _ => Mode::Check,
    };
    handle(mode, body).await
}

async fn handle(mode: Mode, body: Result<Json<JobRequest>, JsonRejection>) -> Response {
    let req = match body {
        Ok(Json(req)) => req,
        Err(rej) => return failure(Failure::malformed(rej.body_text())),
    };
    // the numerics are CPU-bound; keep them off the async workers
    match tokio::task::spawn_blocking(move || jobs::run(mode, &req)).await {
        Ok(Ok(out)) => (StatusCode::OK, Json(out.into_json())).into_response(),
        Ok(Err(f)) => failure(f),
        Err(e) => failure(Failure {
            kind: FailureKind::Internal,
            message: e.to_string(),
            payload: json!({ "error": e.to_string(), "schema_version": SCHEMA_VERSION }),
        }),
    }
}

fn failure(f: Failure) -> Response {
    let status = match f.kind {
        FailureKind::Malformed => StatusCode::BAD_REQUEST,
        FailureKind::Prerequisite | FailureKind::Degenerate => StatusCode::UNPROCESSABLE_ENTITY,
        FailureKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    };
    (status, Json(f.payload)).into_response()
}

pub async fn serve(bind: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await?;
    Ok(())
}
