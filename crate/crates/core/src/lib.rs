//! Survey planning and terrain-change analytics for UAV flood missions.
//!
//! The crate plans meander photo flights over a survey polygon, turns
//! georeferenced point clouds into elevation grids, and compares grids from
//! successive flights to quantify water recession, hazard zones and
//! revisit cadence. Missions and their products persist in a plain
//! directory store.

pub mod analytics;
pub mod coverage;
pub mod dem;
pub mod geodesy;
pub mod geojson;
pub mod geometry;
pub mod sensor;
pub mod store;
pub mod synth;
