use super::AnalyticsError;
use crate::dem::DemGrid;
use crate::geodesy::{EnuPoint, MissionOrigin};
use crate::geometry::{convex_hull, Vec2};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const DEFAULT_MIN_CELLS: usize = 4;
pub const BUFFER_SEGMENTS: usize = 16;

/// Connected patch of cells whose drop reached the threshold, outlined by
/// the convex hull of its cell centres. The hull has fewer than three
/// vertices only for single-cell or single-line patches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct HazardZone {
    pub polygon: Vec<EnuPoint>,
    pub cell_count: usize,
    pub peak_drop_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct StandoffAdvisory {
    pub standoff_m: f64,
    /// One convex polygon per zone, in zone order.
    pub buffer_polygons: Vec<Vec<EnuPoint>>,
}

fn to_enu(v: &[Vec2]) -> Vec<EnuPoint> {
    v.iter().map(|p| EnuPoint::new(p.x, p.y, 0.0)).collect()
}

/// 4-connected components of cells with `−delta ≥ drop_threshold_m`,
/// ordered by their first cell in row-major order. Components smaller than
/// `min_cells` are dropped.
pub fn detect_hazard_zones(
    diff: &DemGrid,
    drop_threshold_m: f64,
    min_cells: usize,
) -> Result<Vec<HazardZone>, AnalyticsError> {
    if !(drop_threshold_m.is_finite() && drop_threshold_m > 0.0) {
        return Err(AnalyticsError::InvalidParam(format!(
            "drop threshold must be positive, got {drop_threshold_m}"
        )));
    }
    let (nc, nr) = (diff.n_cols, diff.n_rows);
    let hot: Vec<bool> = diff
        .values
        .iter()
        .map(|&v| v != diff.nodata && -v >= drop_threshold_m)
        .collect();
    let mut seen = vec![false; hot.len()];
    let mut zones = Vec::new();
    let mut stack = Vec::new();
    for start in 0..hot.len() {
        if !hot[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut centers = Vec::new();
        let mut peak = f64::NEG_INFINITY;
        while let Some(i) = stack.pop() {
            let (col, row) = (i % nc, i / nc);
            let (e, n) = diff.cell_center(col, row);
            centers.push(Vec2::new(e, n));
            peak = peak.max(-diff.values[i]);
            let mut visit = |j: usize| {
                if hot[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if col > 0 {
                visit(i - 1);
            }
            if col + 1 < nc {
                visit(i + 1);
            }
            if row > 0 {
                visit(i - nc);
            }
            if row + 1 < nr {
                visit(i + nc);
            }
        }
        if centers.len() < min_cells.max(1) {
            continue;
        }
        zones.push(HazardZone {
            polygon: to_enu(&convex_hull(&centers)),
            cell_count: centers.len(),
            peak_drop_m: peak,
        });
    }
    Ok(zones)
}

/// Hull of 16-gons of circumradius `standoff_m` centred on each zone vertex.
pub fn buffer_polygon(zone: &[EnuPoint], standoff_m: f64) -> Vec<EnuPoint> {
    let mut pts = Vec::with_capacity(zone.len() * BUFFER_SEGMENTS);
    for v in zone {
        for k in 0..BUFFER_SEGMENTS {
            let a = k as f64 * std::f64::consts::TAU / BUFFER_SEGMENTS as f64;
            pts.push(Vec2::new(
                v.east + standoff_m * a.cos(),
                v.north + standoff_m * a.sin(),
            ));
        }
    }
    to_enu(&convex_hull(&pts))
}

pub fn standoff_buffer(
    zones: &[HazardZone],
    standoff_m: f64,
) -> Result<StandoffAdvisory, AnalyticsError> {
    if !(standoff_m.is_finite() && standoff_m > 0.0) {
        return Err(AnalyticsError::InvalidParam(format!(
            "standoff must be positive, got {standoff_m}"
        )));
    }
    Ok(StandoffAdvisory {
        standoff_m,
        buffer_polygons: zones
            .iter()
            .map(|z| buffer_polygon(&z.polygon, standoff_m))
            .collect(),
    })
}

fn ring_value(ring: &[EnuPoint], origin: &MissionOrigin) -> Result<Value, AnalyticsError> {
    let mut coords = Vec::with_capacity(ring.len() + 1);
    for p in ring.iter().chain(ring.first()) {
        let g = origin.enu_to_wgs84(p)?;
        coords.push(json!([g.lon, g.lat]));
    }
    Ok(Value::Array(coords))
}

fn geometry(ring: &[EnuPoint], origin: &MissionOrigin) -> Result<Value, AnalyticsError> {
    Ok(match ring.len() {
        1 => {
            let g = origin.enu_to_wgs84(&ring[0])?;
            json!({"type": "Point", "coordinates": [g.lon, g.lat]})
        }
        2 => {
            let c = ring_value(ring, origin)?;
            json!({"type": "LineString", "coordinates": c.as_array().unwrap()[..2]})
        }
        _ => json!({"type": "Polygon", "coordinates": [ring_value(ring, origin)?]}),
    })
}

/// FeatureCollection with one feature per zone (`kind: "zone"`) followed by
/// one per buffer (`kind: "buffer"`), in WGS84.
pub fn hazard_geojson(
    zones: &[HazardZone],
    advisory: &StandoffAdvisory,
    origin: &MissionOrigin,
) -> Result<Value, AnalyticsError> {
    let mut features = Vec::new();
    for (i, z) in zones.iter().enumerate() {
        features.push(json!({
            "type": "Feature",
            "properties": {"kind": "zone", "index": i, "cell_count": z.cell_count, "peak_drop_m": z.peak_drop_m},
            "geometry": geometry(&z.polygon, origin)?,
        }));
    }
    for (i, b) in advisory.buffer_polygons.iter().enumerate() {
        features.push(json!({
            "type": "Feature",
            "properties": {"kind": "buffer", "index": i, "standoff_m": advisory.standoff_m},
            "geometry": geometry(b, origin)?,
        }));
    }
    Ok(json!({"type": "FeatureCollection", "features": features}))
}
