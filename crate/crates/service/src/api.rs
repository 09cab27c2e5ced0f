//! HTTP routes.

use crate::error::ApiError;
use crate::ops;
use crate::types::{
    DiffRequest, Health, InspectionCreate, PlanRequest, ProfileRequest, ReportQuery,
};
use axum::extract::{
    DefaultBodyLimit, FromRequest, FromRequestParts, Multipart, Path, Request, State,
};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use floodscout_core::dem::DemBuildParams;
use floodscout_core::sensor::CameraCatalog;
use floodscout_core::store::{EpochProduct, InspectionUpsert, NewMission, ReportOptions, Store};
use serde::de::DeserializeOwned;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

/// Time allowed for one DEM build before the request gives up.
pub const BUILD_BUDGET: Duration = Duration::from_secs(60);
const MAX_UPLOAD_BYTES: usize = 1 << 30;

#[derive(Clone)]
pub struct AppState {
    pub store: Store,
    pub catalog: Arc<CameraCatalog>,
    pub build_budget: Duration,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        AppState {
            store,
            catalog: Arc::new(CameraCatalog::builtin()),
            build_budget: BUILD_BUDGET,
        }
    }
}

/// JSON body whose rejections use the API error shape.
pub struct JsonBody<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for JsonBody<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(JsonBody(v)),
            Err(r) => Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_json",
                r.body_text(),
            )),
        }
    }
}

pub struct QueryParams<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequestParts<S> for QueryParams<T> {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        match axum::extract::Query::<T>::from_request_parts(parts, state).await {
            Ok(q) => Ok(QueryParams(q.0)),
            Err(r) => Err(ApiError::invalid(r.body_text())),
        }
    }
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn with_type(content_type: &'static str, body: impl IntoResponse) -> Response {
    ([(header::CONTENT_TYPE, content_type)], body).into_response()
}

pub fn router(state: AppState, console_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/healthz", get(health))
        .route("/missions", post(create_mission).get(list_missions))
        .route("/missions/{id}", get(get_mission))
        .route("/missions/{id}/plan", post(post_plan))
        .route("/missions/{id}/plan.geojson", get(plan_geojson))
        .route(
            "/missions/{id}/epochs",
            post(post_epoch).layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES)),
        )
        .route("/missions/{id}/epochs/{epoch}/dem.asc", get(dem_asc))
        .route(
            "/missions/{id}/epochs/{epoch}/hillshade.png",
            get(hillshade_png),
        )
        .route("/missions/{id}/profiles", post(post_profiles))
        .route("/missions/{id}/diff", post(post_diff))
        .route("/missions/{id}/inspection-points", post(post_inspection))
        .route(
            "/missions/{id}/inspection-points/{pid}",
            put(put_inspection),
        )
        .route("/missions/{id}/report", get(report_markdown))
        .route("/missions/{id}/report.json", get(report_json))
        .with_state(state);
    let app = match console_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(unknown_route),
    };
    app.layer(
        CorsLayer::new()
            .allow_origin(Any)
            .allow_methods(Any)
            .allow_headers(Any),
    )
}

async fn unknown_route() -> ApiError {
    ApiError::not_found("no such route")
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok".into(),
    })
}

async fn create_mission(
    State(st): State<AppState>,
    JsonBody(req): JsonBody<NewMission>,
) -> Result<Response, ApiError> {
    let m = blocking(move || Ok(st.store.create_mission(req)?)).await?;
    Ok((StatusCode::CREATED, Json(m)).into_response())
}

async fn list_missions(State(st): State<AppState>) -> Result<Response, ApiError> {
    let all = blocking(move || Ok(st.store.list_missions()?)).await?;
    Ok(Json(all).into_response())
}

async fn get_mission(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let m = blocking(move || Ok(st.store.get_mission(&id)?)).await?;
    Ok(Json(m).into_response())
}

async fn post_plan(
    State(st): State<AppState>,
    Path(id): Path<String>,
    JsonBody(req): JsonBody<PlanRequest>,
) -> Result<Response, ApiError> {
    let out = blocking(move || ops::plan(&st.store, &st.catalog, &id, &req)).await?;
    Ok(Json(out).into_response())
}

async fn plan_geojson(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let text = blocking(move || Ok(st.store.latest_plan_geojson(&id)?)).await?;
    Ok(with_type("application/geo+json", text))
}

async fn post_epoch(
    State(st): State<AppState>,
    Path(id): Path<String>,
    mut form: Multipart,
) -> Result<Response, ApiError> {
    let mut cloud = None;
    let mut captured_at: Option<DateTime<Utc>> = None;
    let mut epoch_id = None;
    let mut params = DemBuildParams::default();
    while let Some(field) = form
        .next_field()
        .await
        .map_err(|e| ApiError::invalid(e.body_text()))?
    {
        let name = field.name().unwrap_or_default().to_string();
        let text = field
            .text()
            .await
            .map_err(|e| ApiError::invalid(e.body_text()))?;
        match name.as_str() {
            "cloud" => cloud = Some(text),
            "captured_at" => {
                let t = DateTime::parse_from_rfc3339(text.trim()).map_err(|e| {
                    ApiError::invalid(format!("captured_at `{}`: {e}", text.trim()))
                })?;
                captured_at = Some(t.with_timezone(&Utc));
            }
            "epoch_id" => epoch_id = Some(text.trim().to_string()).filter(|s| !s.is_empty()),
            "params" => {
                params = serde_json::from_str(&text)
                    .map_err(|e| ApiError::invalid(format!("params: {e}")))?;
            }
            other => {
                return Err(ApiError::invalid(format!(
                    "unexpected form field `{other}`"
                )))
            }
        }
    }
    let cloud = cloud.ok_or_else(|| ApiError::invalid("missing form field `cloud`"))?;
    let captured_at =
        captured_at.ok_or_else(|| ApiError::invalid("missing form field `captured_at`"))?;
    let budget = st.build_budget;
    let job = blocking(move || {
        Ok(st
            .store
            .register_epoch(&id, &cloud, captured_at, epoch_id.as_deref(), &params)?)
    });
    match tokio::time::timeout(budget, job).await {
        Ok(rec) => Ok((StatusCode::CREATED, Json(rec?)).into_response()),
        Err(_) => Err(ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "build_timeout",
            format!("DEM build exceeded {} s", budget.as_secs_f64()),
        )),
    }
}

async fn epoch_product(
    st: AppState,
    id: String,
    epoch: String,
    product: EpochProduct,
) -> Result<Vec<u8>, ApiError> {
    blocking(move || {
        let path = st.store.epoch_file(&id, &epoch, product)?;
        std::fs::read(&path).map_err(|e| ApiError::internal(format!("{}: {e}", path.display())))
    })
    .await
}

async fn dem_asc(
    State(st): State<AppState>,
    Path((id, epoch)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let bytes = epoch_product(st, id, epoch, EpochProduct::Dem).await?;
    Ok(with_type("text/plain; charset=utf-8", bytes))
}

async fn hillshade_png(
    State(st): State<AppState>,
    Path((id, epoch)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let bytes = epoch_product(st, id, epoch, EpochProduct::Hillshade).await?;
    Ok(with_type("image/png", bytes))
}

async fn post_profiles(
    State(st): State<AppState>,
    Path(id): Path<String>,
    JsonBody(req): JsonBody<ProfileRequest>,
) -> Result<Response, ApiError> {
    let out = blocking(move || ops::profiles(&st.store, &id, &req)).await?;
    Ok(Json(out).into_response())
}

async fn post_diff(
    State(st): State<AppState>,
    Path(id): Path<String>,
    JsonBody(req): JsonBody<DiffRequest>,
) -> Result<Response, ApiError> {
    let out = blocking(move || ops::diff(&st.store, &id, &req)).await?;
    Ok(Json(out).into_response())
}

async fn post_inspection(
    State(st): State<AppState>,
    Path(id): Path<String>,
    JsonBody(req): JsonBody<InspectionCreate>,
) -> Result<Response, ApiError> {
    let p = blocking(move || {
        Ok(st
            .store
            .add_inspection_point(&id, req.location, req.risk, &req.note)?)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(p)).into_response())
}

async fn put_inspection(
    State(st): State<AppState>,
    Path((id, pid)): Path<(String, String)>,
    JsonBody(req): JsonBody<InspectionUpsert>,
) -> Result<Response, ApiError> {
    let p = blocking(move || Ok(st.store.upsert_inspection_point(&id, &pid, &req)?)).await?;
    Ok(Json(p).into_response())
}

pub fn report_options(q: &ReportQuery) -> ReportOptions {
    let d = ReportOptions::default();
    ReportOptions {
        threshold_m: q.threshold_m.unwrap_or(d.threshold_m),
        standoff_m: q.standoff_m.unwrap_or(d.standoff_m),
        safety_budget_m: q.safety_budget_m.unwrap_or(d.safety_budget_m),
        min_cells: q.min_cells.unwrap_or(d.min_cells),
    }
}

async fn report(
    st: AppState,
    id: String,
    q: ReportQuery,
) -> Result<floodscout_core::store::MissionReport, ApiError> {
    blocking(move || {
        Ok(st
            .store
            .generate_report(&id, &q.a, &q.b, &report_options(&q))?)
    })
    .await
}

async fn report_markdown(
    State(st): State<AppState>,
    Path(id): Path<String>,
    QueryParams(q): QueryParams<ReportQuery>,
) -> Result<Response, ApiError> {
    let r = report(st, id, q).await?;
    Ok(with_type("text/markdown; charset=utf-8", r.markdown))
}

async fn report_json(
    State(st): State<AppState>,
    Path(id): Path<String>,
    QueryParams(q): QueryParams<ReportQuery>,
) -> Result<Response, ApiError> {
    let r = report(st, id, q).await?;
    Ok(with_type("application/json", r.json()))
}
