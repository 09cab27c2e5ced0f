//! File-backed mission store.
//!
//! ```text
//! <root>/
//!   index.json              mission ids in creation order
//!   .store.lock
//!   <mission-id>/
//!     manifest.json
//!     .lock
//!     epochs/<epoch-id>/{cloud.xyz, dem.asc, hillshade.png}
//!     plans/<plan-id>.json, <plan-id>.geojson
//! ```
//!
//! Every manifest and index write goes through a temp file and a rename.
//! Mutations of one mission hold its `.lock`; readers never lock.

mod fsutil;
mod inspection;
mod report;

pub use fsutil::slugify;
pub use inspection::{AuditEntry, InspectionPoint, InspectionStatus, InspectionUpsert, Risk};
pub use report::{
    EpochSummary, HazardSummary, InspectionChecklist, MissionReport, PlanSummary, ReportData,
    ReportOptions, ZoneSummary,
};

use crate::analytics::AnalyticsError;
use crate::coverage::{export_waypoints, CoverageError, CoveragePlan, PlanStats, SurveyPolygon};
use crate::dem::{
    build_dem, parse_xyz, read_asc, render_hillshade, write_asc_string_with, BuildStats,
    DemBuildParams, DemError, DemGrid, GridStats,
};
use crate::geodesy::{GeoPoint, GeodesyError, MissionOrigin};
use chrono::{DateTime, Duration, Utc};
use fsutil::{is_safe_id, write_atomic, LockGuard};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use thiserror::Error;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("out of order: {0}")]
    Ordering(String),
    #[error("illegal status transition {from} -> {to}")]
    Transition {
        from: InspectionStatus,
        to: InspectionStatus,
    },
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("point cloud rejected: {0}")]
    Cloud(#[source] DemError),
    #[error(transparent)]
    Dem(#[from] DemError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
    #[error("corrupt store file {path}: {source}")]
    Corrupt {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification for callers that map errors to statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    NotFound,
    Conflict,
    Invalid,
    Internal,
}

impl StoreError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            StoreError::NotFound(_) => ErrorKind::NotFound,
            StoreError::Conflict(_) | StoreError::Ordering(_) | StoreError::Transition { .. } => {
                ErrorKind::Conflict
            }
            StoreError::Invalid(_)
            | StoreError::Cloud(_)
            | StoreError::Analytics(_)
            | StoreError::Coverage(_)
            | StoreError::Geodesy(_) => ErrorKind::Invalid,
            StoreError::Dem(DemError::Io(_)) => ErrorKind::Internal,
            StoreError::Dem(_) => ErrorKind::Invalid,
            StoreError::Corrupt { .. } | StoreError::Io(_) => ErrorKind::Internal,
        }
    }

    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::NotFound(_) => "not_found",
            StoreError::Conflict(_) => "conflict",
            StoreError::Ordering(_) => "out_of_order",
            StoreError::Transition { .. } => "illegal_transition",
            StoreError::Invalid(_) => "invalid_request",
            StoreError::Cloud(_) => "invalid_cloud",
            StoreError::Dem(_) => "dem_error",
            StoreError::Analytics(_) => "analytics_error",
            StoreError::Coverage(_) => "invalid_plan",
            StoreError::Geodesy(_) => "invalid_coordinates",
            StoreError::Corrupt { .. } => "corrupt_store",
            StoreError::Io(_) => "io_error",
        }
    }
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Starts at a fixed instant and advances by `step` on every reading.
pub struct ManualClock {
    next: Mutex<DateTime<Utc>>,
    step: Duration,
}

impl ManualClock {
    pub fn new(start: DateTime<Utc>, step: Duration) -> Self {
        ManualClock {
            next: Mutex::new(start),
            step,
        }
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<Utc> {
        let mut t = self.next.lock().unwrap_or_else(|p| p.into_inner());
        let now = *t;
        *t = now + self.step;
        now
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct EpochRecord {
    pub epoch_id: String,
    pub captured_at: DateTime<Utc>,
    pub registered_at: DateTime<Utc>,
    /// Paths relative to the mission directory.
    pub cloud_path: String,
    pub dem_path: String,
    pub hillshade_path: String,
    pub build: DemBuildParams,
    pub stats: BuildStats,
    pub dem_stats: Option<GridStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct PlanRef {
    pub plan_id: String,
    pub created_at: DateTime<Utc>,
    pub camera: String,
    pub path: String,
    pub geojson_path: String,
    pub heading_deg: f64,
    pub stats: PlanStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct Mission {
    pub format_version: u32,
    pub id: String,
    pub name: String,
    pub origin: MissionOrigin,
    pub survey_polygon: Option<SurveyPolygon>,
    pub created_at: DateTime<Utc>,
    pub epochs: Vec<EpochRecord>,
    pub inspection_points: Vec<InspectionPoint>,
    pub plans: Vec<PlanRef>,
}

impl Mission {
    pub fn epoch(&self, epoch_id: &str) -> Result<&EpochRecord> {
        self.epochs
            .iter()
            .find(|e| e.epoch_id == epoch_id)
            .ok_or_else(|| {
                StoreError::NotFound(format!("epoch `{epoch_id}` in mission `{}`", self.id))
            })
    }

    pub fn latest_plan(&self) -> Option<&PlanRef> {
        self.plans.last()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct NewMission {
    pub name: String,
    pub origin: GeoPoint,
    #[serde(default)]
    pub survey_polygon: Option<SurveyPolygon>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpochProduct {
    Cloud,
    Dem,
    Hillshade,
}

#[derive(Clone)]
pub struct Store {
    root: PathBuf,
    clock: Arc<dyn Clock>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").field("root", &self.root).finish()
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(|source| StoreError::Corrupt {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("store types serialize");
    s.push(b'\n');
    s
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        Self::with_clock(root, Arc::new(SystemClock))
    }

    pub fn with_clock(root: impl Into<PathBuf>, clock: Arc<dyn Clock>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        Ok(Store { root, clock })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub(crate) fn now(&self) -> DateTime<Utc> {
        self.clock.now()
    }

    pub fn mission_dir(&self, id: &str) -> PathBuf {
        self.root.join(id)
    }

    fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }

    fn read_index(&self) -> Result<Vec<String>> {
        let p = self.index_path();
        if !p.exists() {
            return Ok(Vec::new());
        }
        read_json(&p)
    }

    fn manifest_path(&self, id: &str) -> PathBuf {
        self.mission_dir(id).join("manifest.json")
    }

    pub fn create_mission(&self, new: NewMission) -> Result<Mission> {
        let id = slugify(&new.name);
        if id.is_empty() {
            return Err(StoreError::Invalid(format!(
                "mission name `{}` has no letters or digits",
                new.name
            )));
        }
        let origin = MissionOrigin::new(new.origin)?;
        if let Some(poly) = &new.survey_polygon {
            poly.to_enu(&origin)?;
        }
        let _lock = LockGuard::acquire(&self.root.join(".store.lock"))?;
        let mut index = self.read_index()?;
        if index.contains(&id) || self.mission_dir(&id).exists() {
            return Err(StoreError::Conflict(format!(
                "mission `{id}` already exists"
            )));
        }
        let mission = Mission {
            format_version: MANIFEST_VERSION,
            id: id.clone(),
            name: new.name,
            origin,
            survey_polygon: new.survey_polygon,
            created_at: self.now(),
            epochs: Vec::new(),
            inspection_points: Vec::new(),
            plans: Vec::new(),
        };
        let dir = self.mission_dir(&id);
        std::fs::create_dir_all(dir.join("epochs"))?;
        std::fs::create_dir_all(dir.join("plans"))?;
        write_atomic(&self.manifest_path(&id), &to_json(&mission))?;
        index.push(id);
        write_atomic(&self.index_path(), &to_json(&index))?;
        Ok(mission)
    }

    pub fn get_mission(&self, id: &str) -> Result<Mission> {
        if !is_safe_id(id) {
            return Err(StoreError::NotFound(format!("mission `{id}`")));
        }
        let p = self.manifest_path(id);
        if !p.exists() {
            return Err(StoreError::NotFound(format!("mission `{id}`")));
        }
        read_json(&p)
    }

    /// Missions in creation order.
    pub fn list_missions(&self) -> Result<Vec<Mission>> {
        self.read_index()?
            .iter()
            .map(|id| self.get_mission(id))
            .collect()
    }

    /// Runs `f` on the manifest under the mission lock and persists the
    /// result if `f` succeeds.
    pub(crate) fn mutate<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Mission, &Path) -> Result<T>,
    ) -> Result<T> {
        self.get_mission(id)?;
        let dir = self.mission_dir(id);
        let _lock = LockGuard::acquire(&dir.join(".lock"))?;
        let mut mission: Mission = read_json(&self.manifest_path(id))?;
        let out = f(&mut mission, &dir)?;
        write_atomic(&self.manifest_path(id), &to_json(&mission))?;
        Ok(out)
    }

    /// Parses the cloud, builds DEM and hillshade, and records the epoch.
    /// `epoch_id` defaults to the first free `epochN`.
    pub fn register_epoch(
        &self,
        mission_id: &str,
        cloud_text: &str,
        captured_at: DateTime<Utc>,
        epoch_id: Option<&str>,
        params: &DemBuildParams,
    ) -> Result<EpochRecord> {
        let registered_at = self.now();
        self.mutate(mission_id, |m, dir| {
            let id = match epoch_id {
                Some(id) => id.to_string(),
                None => (m.epochs.len() + 1..)
                    .map(|n| format!("epoch{n}"))
                    .find(|c| m.epochs.iter().all(|e| &e.epoch_id != c))
                    .expect("unbounded range"),
            };
            if !is_safe_id(&id) {
                return Err(StoreError::Invalid(format!(
                    "epoch id `{id}` may only use letters, digits, `-`, `_` and `.`"
                )));
            }
            if m.epochs.iter().any(|e| e.epoch_id == id) {
                return Err(StoreError::Conflict(format!(
                    "epoch `{id}` is already registered"
                )));
            }
            if let Some(last) = m.epochs.last() {
                if captured_at <= last.captured_at {
                    return Err(StoreError::Ordering(format!(
                        "captured_at {} is not after epoch `{}` captured at {}",
                        captured_at.to_rfc3339(),
                        last.epoch_id,
                        last.captured_at.to_rfc3339()
                    )));
                }
            }
            let cloud = parse_xyz(cloud_text)
                .and_then(|raw| raw.into_enu(&m.origin))
                .map_err(StoreError::Cloud)?;
            let (grid, stats) = build_dem(&cloud, params)?;
            let grid = grid.with_epoch(&id, Some(captured_at));
            let shade = render_hillshade(&grid, params.azimuth_deg, params.sun_altitude_deg)?;

            let rel = format!("epochs/{id}");
            let staging = dir.join(format!("epochs/.staging-{id}"));
            let target = dir.join(&rel);
            for stale in [&staging, &target] {
                if stale.exists() {
                    std::fs::remove_dir_all(stale)?;
                }
            }
            std::fs::create_dir_all(&staging)?;
            std::fs::write(staging.join("cloud.xyz"), cloud_text)?;
            std::fs::write(staging.join("dem.asc"), write_asc_string_with(&grid, None))?;
            std::fs::write(staging.join("hillshade.png"), shade.to_png()?)?;
            std::fs::rename(&staging, &target)?;

            let record = EpochRecord {
                epoch_id: id.clone(),
                captured_at,
                registered_at,
                cloud_path: format!("{rel}/cloud.xyz"),
                dem_path: format!("{rel}/dem.asc"),
                hillshade_path: format!("{rel}/hillshade.png"),
                build: *params,
                stats,
                dem_stats: grid.stats(),
            };
            m.epochs.push(record.clone());
            Ok(record)
        })
    }

    pub fn register_epoch_file(
        &self,
        mission_id: &str,
        cloud_path: impl AsRef<Path>,
        captured_at: DateTime<Utc>,
        epoch_id: Option<&str>,
        params: &DemBuildParams,
    ) -> Result<EpochRecord> {
        let text = std::fs::read_to_string(cloud_path)?;
        self.register_epoch(mission_id, &text, captured_at, epoch_id, params)
    }

    pub fn epoch_file(
        &self,
        mission_id: &str,
        epoch_id: &str,
        product: EpochProduct,
    ) -> Result<PathBuf> {
        let m = self.get_mission(mission_id)?;
        let e = m.epoch(epoch_id)?;
        let rel = match product {
            EpochProduct::Cloud => &e.cloud_path,
            EpochProduct::Dem => &e.dem_path,
            EpochProduct::Hillshade => &e.hillshade_path,
        };
        Ok(self.mission_dir(mission_id).join(rel))
    }

    /// The epoch's DEM with its id and capture time attached.
    pub fn load_dem(&self, mission_id: &str, epoch_id: &str) -> Result<DemGrid> {
        let m = self.get_mission(mission_id)?;
        let e = m.epoch(epoch_id)?;
        let grid = read_asc(self.mission_dir(mission_id).join(&e.dem_path))?;
        Ok(grid.with_epoch(epoch_id, Some(e.captured_at)))
    }

    /// Persists a plan. An identical plan for the same camera is not stored
    /// twice; its existing reference is returned instead.
    pub fn save_plan(
        &self,
        mission_id: &str,
        plan: &CoveragePlan,
        camera: &str,
    ) -> Result<PlanRef> {
        let created_at = self.now();
        self.mutate(mission_id, |m, dir| {
            for r in m.plans.iter().rev() {
                if r.camera == camera {
                    let existing: CoveragePlan = read_json(&dir.join(&r.path))?;
                    if &existing == plan {
                        return Ok(r.clone());
                    }
                }
            }
            let plan_id = format!("plan-{:03}", m.plans.len() + 1);
            let path = format!("plans/{plan_id}.json");
            let geojson_path = format!("plans/{plan_id}.geojson");
            std::fs::create_dir_all(dir.join("plans"))?;
            write_atomic(&dir.join(&path), &to_json(plan))?;
            write_atomic(&dir.join(&geojson_path), export_waypoints(plan).as_bytes())?;
            let r = PlanRef {
                plan_id,
                created_at,
                camera: camera.to_string(),
                path,
                geojson_path,
                heading_deg: plan.heading_deg,
                stats: plan.stats,
            };
            m.plans.push(r.clone());
            Ok(r)
        })
    }

    pub fn load_plan(&self, mission_id: &str, plan_id: &str) -> Result<CoveragePlan> {
        let m = self.get_mission(mission_id)?;
        let r = m
            .plans
            .iter()
            .find(|p| p.plan_id == plan_id)
            .ok_or_else(|| {
                StoreError::NotFound(format!("plan `{plan_id}` in mission `{mission_id}`"))
            })?;
        read_json(&self.mission_dir(mission_id).join(&r.path))
    }

    pub fn latest_plan_geojson(&self, mission_id: &str) -> Result<String> {
        let m = self.get_mission(mission_id)?;
        let r = m.latest_plan().ok_or_else(|| {
            StoreError::NotFound(format!("no plan recorded for mission `{mission_id}`"))
        })?;
        Ok(std::fs::read_to_string(
            self.mission_dir(mission_id).join(&r.geojson_path),
        )?)
    }
}
