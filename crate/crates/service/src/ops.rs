//! Mission-level operations shared by the HTTP routes and the CLI.

use crate::error::ApiError;
use crate::types::{
    DiffRequest, DiffResponse, PlanRequest, PlanResponse, ProfileRequest, ProfileResponse,
};
use axum::http::StatusCode;
use floodscout_core::analytics::{
    compare_profiles, detect_hazard_zones, diff_dem, extract_profile, hazard_geojson, profile_csv,
    standoff_buffer, ProfileLine,
};
use floodscout_core::coverage::{plan_coverage, SurveyPolygon};
use floodscout_core::geojson::{line_string, polygon_ring};
use floodscout_core::sensor::CameraCatalog;
use floodscout_core::store::{Store, StoreError};

pub fn plan(
    store: &Store,
    catalog: &CameraCatalog,
    mission_id: &str,
    req: &PlanRequest,
) -> Result<PlanResponse, ApiError> {
    let mission = store.get_mission(mission_id)?;
    let poly = match &req.polygon {
        Some(v) => SurveyPolygon::new(polygon_ring(v)?).map_err(StoreError::from)?,
        None => mission.survey_polygon.clone().ok_or_else(|| {
            ApiError::invalid("no polygon given and the mission has no survey polygon")
        })?,
    };
    let camera = match &req.camera_spec {
        Some(c) => c.clone(),
        None => catalog
            .get(&req.camera)
            .map_err(|e| {
                ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "unknown_camera",
                    e.to_string(),
                )
            })?
            .clone(),
    };
    let plan =
        plan_coverage(&poly, &camera, &req.params, &mission.origin).map_err(StoreError::from)?;
    let plan_ref = store.save_plan(mission_id, &plan, &camera.name)?;
    Ok(PlanResponse { plan_ref, plan })
}

pub fn profiles(
    store: &Store,
    mission_id: &str,
    req: &ProfileRequest,
) -> Result<ProfileResponse, ApiError> {
    if req.epochs.is_empty() {
        return Err(ApiError::invalid("at least one epoch id is required"));
    }
    let mission = store.get_mission(mission_id)?;
    let line = ProfileLine::new(line_string(&req.line)?, req.label.clone());
    let mut profiles = Vec::with_capacity(req.epochs.len());
    for e in &req.epochs {
        let dem = store.load_dem(mission_id, e)?;
        profiles.push(
            extract_profile(&dem, &line, req.step_m, &mission.origin).map_err(StoreError::from)?,
        );
    }
    let comparisons = profiles
        .windows(2)
        .map(|w| compare_profiles(&w[0], &w[1]))
        .collect::<Result<Vec<_>, _>>()
        .map_err(StoreError::from)?;
    Ok(ProfileResponse {
        csv: profiles.iter().map(profile_csv).collect(),
        profiles,
        comparisons,
    })
}

pub fn diff(store: &Store, mission_id: &str, req: &DiffRequest) -> Result<DiffResponse, ApiError> {
    let mission = store.get_mission(mission_id)?;
    let a = store.load_dem(mission_id, &req.epoch_a)?;
    let b = store.load_dem(mission_id, &req.epoch_b)?;
    let run = || -> Result<DiffResponse, floodscout_core::analytics::AnalyticsError> {
        let (delta, change) = diff_dem(&a, &b, req.threshold_m)?;
        let zones = detect_hazard_zones(&delta, req.threshold_m, req.min_cells)?;
        let advisory = standoff_buffer(&zones, req.standoff_m)?;
        let geojson = hazard_geojson(&zones, &advisory, &mission.origin)?;
        Ok(DiffResponse {
            change,
            zones,
            advisory,
            geojson,
        })
    };
    Ok(run().map_err(StoreError::from)?)
}
