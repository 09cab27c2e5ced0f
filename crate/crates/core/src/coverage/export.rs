//! Waypoint GeoJSON handed to the flight app.
//!
//! One Point feature per waypoint, in flight order, followed by a single
//! LineString of the whole path. Coordinates carry 6 decimals, metre values
//! 2 decimals, so `parse` followed by `to_geojson` reproduces the input
//! byte for byte.

use super::{CoverageError, CoveragePlan, WaypointAction};
use serde_json::Value;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct ExportedWaypoint {
    pub order: usize,
    pub lat: f64,
    pub lon: f64,
    pub action: WaypointAction,
    pub altitude_agl_m: f64,
    pub trigger_distance_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaypointDocument {
    pub waypoints: Vec<ExportedWaypoint>,
    /// `(lon, lat)` pairs of the full path.
    pub path: Vec<(f64, f64)>,
}

impl WaypointDocument {
    pub fn from_plan(plan: &CoveragePlan) -> Self {
        let waypoints: Vec<ExportedWaypoint> = plan
            .waypoints
            .iter()
            .enumerate()
            .map(|(order, w)| ExportedWaypoint {
                order,
                lat: w.position.lat,
                lon: w.position.lon,
                action: w.action,
                altitude_agl_m: plan.altitude_agl,
                trigger_distance_m: plan.trigger_distance,
            })
            .collect();
        let path = waypoints.iter().map(|w| (w.lon, w.lat)).collect();
        WaypointDocument { waypoints, path }
    }

    pub fn to_geojson(&self) -> String {
        let mut out = String::from("{\"type\":\"FeatureCollection\",\"features\":[\n");
        for w in &self.waypoints {
            let _ = writeln!(
                out,
                "{{\"type\":\"Feature\",\"geometry\":{{\"type\":\"Point\",\"coordinates\":[{:.6},{:.6}]}},\
                 \"properties\":{{\"order\":{},\"action\":\"{}\",\"altitude_agl_m\":{:.2},\"trigger_distance_m\":{:.2}}}}},",
                w.lon,
                w.lat,
                w.order,
                w.action.as_str(),
                w.altitude_agl_m,
                w.trigger_distance_m
            );
        }
        out.push_str(
            "{\"type\":\"Feature\",\"geometry\":{\"type\":\"LineString\",\"coordinates\":[",
        );
        for (i, (lon, lat)) in self.path.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "[{lon:.6},{lat:.6}]");
        }
        out.push_str("]},\"properties\":{\"kind\":\"path\"}}\n]}\n");
        out
    }

    pub fn parse(text: &str) -> Result<Self, CoverageError> {
        let bad = |m: &str| CoverageError::Document(m.to_string());
        let v: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
        let features = v
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing features"))?;
        let mut waypoints = Vec::new();
        let mut path = Vec::new();
        for f in features {
            let geom = f
                .get("geometry")
                .ok_or_else(|| bad("feature without geometry"))?;
            let coords = geom
                .get("coordinates")
                .ok_or_else(|| bad("geometry without coordinates"))?;
            let pair = |c: &Value| -> Result<(f64, f64), CoverageError> {
                match c.as_array().map(|a| a.as_slice()) {
                    Some([lon, lat, ..]) => Ok((
                        lon.as_f64().ok_or_else(|| bad("bad lon"))?,
                        lat.as_f64().ok_or_else(|| bad("bad lat"))?,
                    )),
                    _ => Err(bad("bad position")),
                }
            };
            match geom.get("type").and_then(Value::as_str) {
                Some("Point") => {
                    let (lon, lat) = pair(coords)?;
                    let props = f
                        .get("properties")
                        .ok_or_else(|| bad("point without properties"))?;
                    let num = |k: &str| props.get(k).and_then(Value::as_f64).ok_or_else(|| bad(k));
                    waypoints.push(ExportedWaypoint {
                        order: props
                            .get("order")
                            .and_then(Value::as_u64)
                            .ok_or_else(|| bad("order"))? as usize,
                        lat,
                        lon,
                        action: props
                            .get("action")
                            .and_then(Value::as_str)
                            .and_then(WaypointAction::parse)
                            .ok_or_else(|| bad("action"))?,
                        altitude_agl_m: num("altitude_agl_m")?,
                        trigger_distance_m: num("trigger_distance_m")?,
                    });
                }
                Some("LineString") => {
                    path = coords
                        .as_array()
                        .ok_or_else(|| bad("bad LineString"))?
                        .iter()
                        .map(pair)
                        .collect::<Result<_, _>>()?;
                }
                _ => return Err(bad("unexpected geometry type")),
            }
        }
        waypoints.sort_by_key(|w| w.order);
        Ok(WaypointDocument { waypoints, path })
    }
}

pub fn export_waypoints(plan: &CoveragePlan) -> String {
    WaypointDocument::from_plan(plan).to_geojson()
}
