//! Boustrophedon ("meander") survey planning over a polygon.
//!
//! Planning happens in a sweep frame: `u` runs along the flight lines
//! (the heading), `v` runs across them, to the right of the heading.
//! Rows of flight lines sit at constant `v`, spaced by the across-track
//! footprint reduced by the side overlap.

mod export;
mod planner;
mod sorties;
mod verify;

pub use export::{export_waypoints, ExportedWaypoint, WaypointDocument};
pub use planner::{auto_heading, estimate_stats, plan_coverage, swath_intervals};
pub use sorties::partition_sorties;
pub use verify::verify_coverage;

use crate::geodesy::{EnuPoint, GeoPoint, GeodesyError, MissionOrigin};
use crate::geometry::{is_simple, signed_area, Vec2};
use crate::sensor::{FootprintDims, SensorError};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("invalid survey polygon: {0}")]
    Polygon(String),
    #[error("invalid coverage parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
    #[error(transparent)]
    Sensor(#[from] SensorError),
    #[error("line {index} alone needs {needed_s:.1} s, endurance is {endurance_s:.1} s")]
    InfeasibleSortie {
        index: usize,
        needed_s: f64,
        endurance_s: f64,
    },
    #[error("waypoint document: {0}")]
    Document(String),
}

/// Simple polygon with at least three vertices and non-zero area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(try_from = "Vec<GeoPoint>", into = "Vec<GeoPoint>")]
pub struct SurveyPolygon {
    vertices: Vec<GeoPoint>,
}

impl SurveyPolygon {
    pub fn new(mut vertices: Vec<GeoPoint>) -> Result<Self, CoverageError> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(CoverageError::Polygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        for v in &vertices {
            v.validate()?;
        }
        let local = MissionOrigin::new(vertices[0])?;
        let ring = project(&vertices, &local)?;
        if signed_area(&ring).abs() < 1e-6 {
            return Err(CoverageError::Polygon("polygon has zero area".into()));
        }
        if !is_simple(&ring) {
            return Err(CoverageError::Polygon(
                "polygon is self-intersecting".into(),
            ));
        }
        Ok(SurveyPolygon { vertices })
    }

    /// Builds a polygon from local coordinates around `origin`.
    pub fn from_enu(ring: &[Vec2], origin: &MissionOrigin) -> Result<Self, CoverageError> {
        let verts = ring
            .iter()
            .map(|p| origin.enu_to_wgs84(&EnuPoint::new(p.x, p.y, 0.0)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(verts)
    }

    pub fn vertices(&self) -> &[GeoPoint] {
        &self.vertices
    }

    /// Ring in mission ENU metres (x = east, y = north).
    pub fn to_enu(&self, origin: &MissionOrigin) -> Result<Vec<Vec2>, CoverageError> {
        Ok(project(&self.vertices, origin)?)
    }
}

impl TryFrom<Vec<GeoPoint>> for SurveyPolygon {
    type Error = CoverageError;
    fn try_from(v: Vec<GeoPoint>) -> Result<Self, Self::Error> {
        SurveyPolygon::new(v)
    }
}

impl From<SurveyPolygon> for Vec<GeoPoint> {
    fn from(p: SurveyPolygon) -> Self {
        p.vertices
    }
}

fn project(verts: &[GeoPoint], origin: &MissionOrigin) -> Result<Vec<Vec2>, GeodesyError> {
    verts
        .iter()
        .map(|g| origin.wgs84_to_enu(g).map(|e| Vec2::new(e.east, e.north)))
        .collect()
}

/// Flight-line direction: explicit bearing in degrees clockwise from north,
/// or derived from the polygon's longest edge.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Heading {
    #[default]
    Auto,
    Degrees(f64),
}

impl Serialize for Heading {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Heading::Auto => s.serialize_str("auto"),
            Heading::Degrees(d) => s.serialize_f64(*d),
        }
    }
}

impl<'de> Deserialize<'de> for Heading {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Heading::Degrees(x)),
            Repr::Text(t) if t.eq_ignore_ascii_case("auto") => Ok(Heading::Auto),
            Repr::Text(t) => t.parse::<f64>().map(Heading::Degrees).map_err(|_| {
                serde::de::Error::custom(format!("heading `{t}` is neither a number nor `auto`"))
            }),
        }
    }
}

#[cfg(feature = "schema")]
impl schemars::JsonSchema for Heading {
    fn schema_name() -> std::borrow::Cow<'static, str> {
        "Heading".into()
    }
    fn json_schema(_: &mut schemars::SchemaGenerator) -> schemars::Schema {
        schemars::json_schema!({
            "oneOf": [{"type": "number"}, {"type": "string", "enum": ["auto"]}]
        })
    }
}

impl std::str::FromStr for Heading {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(Heading::Auto)
        } else {
            s.parse::<f64>()
                .map(Heading::Degrees)
                .map_err(|_| format!("heading `{s}` is neither a number nor `auto`"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(default)]
pub struct CoverageParams {
    pub altitude_agl: f64,
    pub side_overlap: f64,
    pub front_overlap: f64,
    pub heading: Heading,
    /// m/s
    pub cruise_speed: f64,
    /// Seconds added per line change.
    pub turn_penalty: f64,
    /// Battery endurance per sortie, seconds.
    pub endurance: f64,
}

impl Default for CoverageParams {
    fn default() -> Self {
        CoverageParams {
            altitude_agl: 50.0,
            side_overlap: 0.65,
            front_overlap: 0.75,
            heading: Heading::Auto,
            cruise_speed: 5.0,
            turn_penalty: 3.0,
            endurance: 1500.0,
        }
    }
}

impl CoverageParams {
    pub fn validate(&self) -> Result<(), CoverageError> {
        let err = |m: String| Err(CoverageError::Params(m));
        for (name, o) in [
            ("side_overlap", self.side_overlap),
            ("front_overlap", self.front_overlap),
        ] {
            if !(0.0..=0.95).contains(&o) {
                return err(format!("{name} {o} outside [0, 0.95]"));
            }
        }
        if !(self.altitude_agl.is_finite() && self.altitude_agl > 0.0) {
            return err(format!(
                "altitude_agl must be positive, got {}",
                self.altitude_agl
            ));
        }
        if !(self.cruise_speed.is_finite() && self.cruise_speed > 0.0) {
            return err(format!(
                "cruise_speed must be positive, got {}",
                self.cruise_speed
            ));
        }
        if !(self.turn_penalty.is_finite() && self.turn_penalty >= 0.0) {
            return err(format!(
                "turn_penalty must be >= 0, got {}",
                self.turn_penalty
            ));
        }
        if !(self.endurance.is_finite() && self.endurance > 0.0) {
            return err(format!(
                "endurance must be positive, got {}",
                self.endurance
            ));
        }
        if let Heading::Degrees(d) = self.heading {
            if !d.is_finite() {
                return err("heading must be finite".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum WaypointAction {
    FlyTo,
    LineStart,
    LineEnd,
}

impl WaypointAction {
    pub fn as_str(&self) -> &'static str {
        match self {
            WaypointAction::FlyTo => "fly_to",
            WaypointAction::LineStart => "line_start",
            WaypointAction::LineEnd => "line_end",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fly_to" => Some(WaypointAction::FlyTo),
            "line_start" => Some(WaypointAction::LineStart),
            "line_end" => Some(WaypointAction::LineEnd),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct Waypoint {
    pub position: GeoPoint,
    pub action: WaypointAction,
}

/// One straight photo pass. `row` is the sweep-row index; a concave polygon
/// can produce several lines in the same row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct FlightLine {
    pub row: usize,
    pub start: EnuPoint,
    pub end: EnuPoint,
}

impl FlightLine {
    pub fn length(&self) -> f64 {
        Vec2::new(
            self.end.east - self.start.east,
            self.end.north - self.start.north,
        )
        .norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct PlanStats {
    pub total_path_m: f64,
    pub est_flight_s: f64,
    pub photo_count: usize,
    pub line_count: usize,
    pub est_gsd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct CoveragePlan {
    pub origin: MissionOrigin,
    pub params: CoverageParams,
    /// Heading actually flown, after resolving `auto`.
    pub heading_deg: f64,
    pub altitude_agl: f64,
    pub footprint: FootprintDims,
    pub line_spacing: f64,
    pub trigger_distance: f64,
    pub lines: Vec<FlightLine>,
    pub photo_positions: Vec<EnuPoint>,
    pub waypoints: Vec<Waypoint>,
    pub stats: PlanStats,
}
