//! Request and response bodies of the HTTP API.

use floodscout_core::analytics::{
    ChangeReport, ElevationProfile, HazardZone, ProfileComparison, StandoffAdvisory,
};
use floodscout_core::coverage::{CoverageParams, CoveragePlan};
use floodscout_core::geodesy::GeoPoint;
use floodscout_core::sensor::CameraSpec;
use floodscout_core::store::{PlanRef, Risk};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Health {
    pub status: String,
}

/// Survey request. Without `polygon` the mission's survey polygon is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PlanRequest {
    /// GeoJSON Polygon, Feature or FeatureCollection.
    #[serde(default)]
    pub polygon: Option<Value>,
    /// Catalog camera name.
    #[serde(default = "default_camera")]
    pub camera: String,
    /// Custom camera; overrides `camera`.
    #[serde(default)]
    pub camera_spec: Option<CameraSpec>,
    #[serde(default)]
    pub params: CoverageParams,
}

pub fn default_camera() -> String {
    "mz2".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PlanResponse {
    pub plan_ref: PlanRef,
    pub plan: CoveragePlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ProfileRequest {
    /// GeoJSON LineString, Feature or FeatureCollection.
    pub line: Value,
    pub epochs: Vec<String>,
    #[serde(default)]
    pub step_m: Option<f64>,
    #[serde(default)]
    pub label: String,
}

/// One profile per requested epoch, in request order, and the comparison of
/// each consecutive pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ProfileResponse {
    pub profiles: Vec<ElevationProfile>,
    pub csv: Vec<String>,
    pub comparisons: Vec<ProfileComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DiffRequest {
    pub epoch_a: String,
    pub epoch_b: String,
    #[serde(default = "default_threshold")]
    pub threshold_m: f64,
    #[serde(default = "default_standoff")]
    pub standoff_m: f64,
    #[serde(default = "default_min_cells")]
    pub min_cells: usize,
}

fn default_threshold() -> f64 {
    0.2
}

fn default_standoff() -> f64 {
    100.0
}

fn default_min_cells() -> usize {
    floodscout_core::analytics::DEFAULT_MIN_CELLS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DiffResponse {
    pub change: ChangeReport,
    pub zones: Vec<HazardZone>,
    pub advisory: StandoffAdvisory,
    /// Zones and buffers as a WGS84 FeatureCollection.
    pub geojson: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct InspectionCreate {
    pub location: GeoPoint,
    pub risk: Risk,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ReportQuery {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub threshold_m: Option<f64>,
    #[serde(default)]
    pub standoff_m: Option<f64>,
    #[serde(default)]
    pub safety_budget_m: Option<f64>,
    #[serde(default)]
    pub min_cells: Option<usize>,
}
