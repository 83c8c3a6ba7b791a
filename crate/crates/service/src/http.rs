//! The HTTP API. Handlers read an immutable store snapshot, so identical
//! requests give byte-identical responses.

use std::sync::Arc;

use axum::extract::{RawQuery, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use nfdb_core::Store;
use serde::Serialize;

use crate::api;
use crate::error::ServiceError;
use crate::params::parse_query;

pub type Shared = Arc<Store>;

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = if self.is_client_error() {
            StatusCode::BAD_REQUEST
        } else {
            StatusCode::INTERNAL_SERVER_ERROR
        };
        (
            status,
            Json(ErrorBody {
                error: self.to_string(),
            }),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<T, ServiceError>;

async fn fields(
    State(store): State<Shared>,
    RawQuery(q): RawQuery,
) -> ApiResult<Json<api::FieldsResponse>> {
    api::fields(&store, &parse_query(q.as_deref())).map(Json)
}

async fn fields_text(State(store): State<Shared>, RawQuery(q): RawQuery) -> ApiResult<Response> {
    let body = api::fields_text(&store, &parse_query(q.as_deref()))?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], body).into_response())
}

async fn summary(
    State(store): State<Shared>,
    RawQuery(q): RawQuery,
) -> ApiResult<Json<nfdb_core::report::GroupSummary>> {
    api::summary(&store, &parse_query(q.as_deref())).map(Json)
}

async fn mass(
    State(store): State<Shared>,
    RawQuery(q): RawQuery,
) -> ApiResult<Json<api::MassResponse>> {
    api::mass(&store, &parse_query(q.as_deref())).map(Json)
}

async fn grd(RawQuery(q): RawQuery) -> ApiResult<Json<api::GrdResponse>> {
    api::grd(&parse_query(q.as_deref())).map(Json)
}

async fn health(State(store): State<Shared>) -> Json<api::Health> {
    Json(api::health(&store))
}

pub fn router(store: Shared) -> Router {
    Router::new()
        .route("/api/fields", get(fields))
        .route("/api/fields.txt", get(fields_text))
        .route("/api/summary", get(summary))
        .route("/api/mass", get(mass))
        .route("/api/grd", get(grd))
        .route("/api/health", get(health))
        .with_state(store)
}

pub async fn serve(store: Store, listen: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(listen).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(store))).await
}
