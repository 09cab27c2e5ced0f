//! Minimal GeoJSON geometry readers for survey polygons and profile lines.
//!
//! Accepts a bare geometry, a Feature, or a FeatureCollection (first
//! feature). Positions are `[lon, lat]` or `[lon, lat, alt]`.

use crate::geodesy::GeoPoint;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeoJsonError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("expected a {expected} geometry, found {found}")]
    WrongType {
        expected: &'static str,
        found: String,
    },
    #[error("polygon holes are not supported ({0} interior rings)")]
    Holes(usize),
    #[error("malformed coordinates: {0}")]
    Coordinates(String),
}

fn geometry(value: &Value) -> Result<&Value, GeoJsonError> {
    match value.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => {
            let first = value
                .get("features")
                .and_then(Value::as_array)
                .and_then(|f| f.first())
                .ok_or_else(|| GeoJsonError::Coordinates("empty FeatureCollection".into()))?;
            geometry(first)
        }
        Some("Feature") => value
            .get("geometry")
            .filter(|g| !g.is_null())
            .ok_or_else(|| GeoJsonError::Coordinates("feature without geometry".into())),
        Some(_) => Ok(value),
        None => Err(GeoJsonError::Coordinates("missing `type`".into())),
    }
}

fn position(v: &Value) -> Result<GeoPoint, GeoJsonError> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2 || a.len() == 3)
        .ok_or_else(|| GeoJsonError::Coordinates(format!("bad position {v}")))?;
    let num = |i: usize| {
        arr[i]
            .as_f64()
            .ok_or_else(|| GeoJsonError::Coordinates(format!("non-numeric position {v}")))
    };
    let alt = if arr.len() == 3 { num(2)? } else { 0.0 };
    GeoPoint::new(num(1)?, num(0)?, alt).map_err(|e| GeoJsonError::Coordinates(e.to_string()))
}

fn positions(v: &Value) -> Result<Vec<GeoPoint>, GeoJsonError> {
    v.as_array()
        .ok_or_else(|| GeoJsonError::Coordinates("expected an array of positions".into()))?
        .iter()
        .map(position)
        .collect()
}

fn typed<'a>(value: &'a Value, expected: &'static str) -> Result<&'a Value, GeoJsonError> {
    let g = geometry(value)?;
    let found = g.get("type").and_then(Value::as_str).unwrap_or("?");
    if found != expected {
        return Err(GeoJsonError::WrongType {
            expected,
            found: found.to_string(),
        });
    }
    g.get("coordinates")
        .ok_or_else(|| GeoJsonError::Coordinates("missing `coordinates`".into()))
}

/// Outer ring of a Polygon, without the repeated closing vertex.
pub fn polygon_ring(value: &Value) -> Result<Vec<GeoPoint>, GeoJsonError> {
    let rings = typed(value, "Polygon")?
        .as_array()
        .ok_or_else(|| GeoJsonError::Coordinates("polygon rings must be an array".into()))?;
    if rings.len() > 1 {
        return Err(GeoJsonError::Holes(rings.len() - 1));
    }
    let mut ring = rings
        .first()
        .map(positions)
        .transpose()?
        .unwrap_or_default();
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    Ok(ring)
}

pub fn line_string(value: &Value) -> Result<Vec<GeoPoint>, GeoJsonError> {
    positions(typed(value, "LineString")?)
}

pub fn parse_polygon(text: &str) -> Result<Vec<GeoPoint>, GeoJsonError> {
    let v: Value = serde_json::from_str(text).map_err(|e| GeoJsonError::Json(e.to_string()))?;
    polygon_ring(&v)
}

pub fn parse_line_string(text: &str) -> Result<Vec<GeoPoint>, GeoJsonError> {
    let v: Value = serde_json::from_str(text).map_err(|e| GeoJsonError::Json(e.to_string()))?;
    line_string(&v)
}

/// Closed Polygon geometry value for a ring of points.
pub fn polygon_value(ring: &[GeoPoint]) -> Value {
    let mut coords: Vec<Value> = ring
        .iter()
        .map(|p| serde_json::json!([p.lon, p.lat]))
        .collect();
    if let Some(first) = coords.first().cloned() {
        coords.push(first);
    }
    serde_json::json!({"type": "Polygon", "coordinates": [coords]})
}
