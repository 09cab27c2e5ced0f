//! Terrain change analytics between survey epochs.
//!
//! Deltas are always `b − a`, later minus earlier. A falling surface gives
//! negative deltas; "drop" quantities are the positive magnitude.

mod cadence;
mod change;
mod hazard;
mod profile;

pub use cadence::{
    estimate_recession_rate, recommend_revisit, RecessionRate, Trend, DEFAULT_SAFETY_BUDGET_M,
    MAX_REVISIT_H, MIN_REVISIT_H,
};
pub use change::{diff_dem, ChangeReport};
pub use hazard::{
    buffer_polygon, detect_hazard_zones, hazard_geojson, standoff_buffer, HazardZone,
    StandoffAdvisory, BUFFER_SEGMENTS, DEFAULT_MIN_CELLS,
};
pub use profile::{
    compare_profiles, extract_profile, extract_profile_enu, profile_csv, DeltaSummary,
    ElevationProfile, ProfileComparison, ProfileLine, Station,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("invalid profile line: {0}")]
    InvalidLine(String),
    #[error("{0}")]
    InvalidParam(String),
    #[error("profiles do not align: {0}")]
    StationMismatch(String),
    #[error("grids do not overlap")]
    NoOverlap,
    #[error("no cell is valid in both grids")]
    NoValidCells,
    #[error(transparent)]
    Geodesy(#[from] crate::geodesy::GeodesyError),
    #[error(transparent)]
    Dem(#[from] crate::dem::DemError),
}
