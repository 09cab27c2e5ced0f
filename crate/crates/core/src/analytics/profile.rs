use super::AnalyticsError;
use crate::dem::{sample_bilinear, DemGrid};
use crate::geodesy::{EnuPoint, GeoPoint, MissionOrigin};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Operator-drawn polyline along which elevations are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct ProfileLine {
    pub vertices: Vec<GeoPoint>,
    #[serde(default)]
    pub label: String,
}

impl ProfileLine {
    pub fn new(vertices: Vec<GeoPoint>, label: impl Into<String>) -> Self {
        ProfileLine {
            vertices,
            label: label.into(),
        }
    }

    pub fn to_enu(&self, origin: &MissionOrigin) -> Result<Vec<EnuPoint>, AnalyticsError> {
        let pts = self
            .vertices
            .iter()
            .map(|v| origin.wgs84_to_enu(v))
            .collect::<Result<Vec<_>, _>>()?;
        check_polyline(&pts)?;
        Ok(pts)
    }
}

fn check_polyline(pts: &[EnuPoint]) -> Result<(), AnalyticsError> {
    if pts.len() < 2 {
        return Err(AnalyticsError::InvalidLine(format!(
            "profile line needs at least 2 vertices, got {}",
            pts.len()
        )));
    }
    for (i, w) in pts.windows(2).enumerate() {
        if (w[1].east - w[0].east).hypot(w[1].north - w[0].north) == 0.0 {
            return Err(AnalyticsError::InvalidLine(format!(
                "vertices {i} and {} coincide",
                i + 1
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct Station {
    pub distance_m: f64,
    pub east: f64,
    pub north: f64,
    pub lat: f64,
    pub lon: f64,
    /// `None` where the grid has no data.
    pub elevation_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct ElevationProfile {
    pub label: String,
    pub epoch_id: String,
    pub step_m: f64,
    pub length_m: f64,
    pub stations: Vec<Station>,
    /// Set when no station lies on the grid.
    pub outside_grid: bool,
}

impl ElevationProfile {
    pub fn valid_count(&self) -> usize {
        self.stations
            .iter()
            .filter(|s| s.elevation_m.is_some())
            .count()
    }
}

/// Station distances: multiples of `step` below the total length plus every
/// vertex distance, sorted, with near-duplicates of a vertex collapsed onto it.
fn station_distances(cum: &[f64], step: f64) -> Vec<(f64, usize)> {
    let total = *cum.last().unwrap();
    let eps = 1e-9 * total.max(1.0);
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut k = 0usize;
    for seg in 0..cum.len() - 1 {
        let (d0, d1) = (cum[seg], cum[seg + 1]);
        if seg == 0 {
            out.push((d0, 0));
        }
        loop {
            let d = k as f64 * step;
            if d > d1 - eps {
                break;
            }
            if d > d0 + eps {
                out.push((d, seg));
            }
            k += 1;
        }
        out.push((d1, seg));
    }
    out
}

/// Samples `grid` along the ENU polyline. `step_m` defaults to half a cell.
pub fn extract_profile_enu(
    grid: &DemGrid,
    vertices: &[EnuPoint],
    step_m: Option<f64>,
    origin: &MissionOrigin,
) -> Result<ElevationProfile, AnalyticsError> {
    check_polyline(vertices)?;
    let step = step_m.unwrap_or(grid.cell_size / 2.0);
    if !(step.is_finite() && step > 0.0) {
        return Err(AnalyticsError::InvalidParam(format!(
            "step must be positive, got {step}"
        )));
    }
    let mut cum = vec![0.0];
    for w in vertices.windows(2) {
        let l = (w[1].east - w[0].east).hypot(w[1].north - w[0].north);
        cum.push(cum.last().unwrap() + l);
    }
    let length_m = *cum.last().unwrap();

    let mut stations = Vec::new();
    for (d, seg) in station_distances(&cum, step) {
        let (a, b) = (vertices[seg], vertices[seg + 1]);
        let t = ((d - cum[seg]) / (cum[seg + 1] - cum[seg])).clamp(0.0, 1.0);
        let east = a.east + (b.east - a.east) * t;
        let north = a.north + (b.north - a.north) * t;
        let geo = origin.enu_to_wgs84(&EnuPoint::new(east, north, 0.0))?;
        stations.push(Station {
            distance_m: d,
            east,
            north,
            lat: geo.lat,
            lon: geo.lon,
            elevation_m: sample_bilinear(grid, east, north),
        });
    }
    let outside_grid = stations.iter().all(|s| {
        s.east < grid.origin_east
            || s.east > grid.max_east()
            || s.north < grid.origin_north
            || s.north > grid.max_north()
    });
    Ok(ElevationProfile {
        label: String::new(),
        epoch_id: grid.epoch_id.clone(),
        step_m: step,
        length_m,
        stations,
        outside_grid,
    })
}

pub fn extract_profile(
    grid: &DemGrid,
    line: &ProfileLine,
    step_m: Option<f64>,
    origin: &MissionOrigin,
) -> Result<ElevationProfile, AnalyticsError> {
    let mut p = extract_profile_enu(grid, &line.to_enu(origin)?, step_m, origin)?;
    p.label = line.label.clone();
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct DeltaSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub valid_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct ProfileComparison {
    pub epoch_a: String,
    pub epoch_b: String,
    pub distances_m: Vec<f64>,
    /// `b − a` per station; `None` where either side has no data.
    pub deltas: Vec<Option<f64>>,
    /// Absent when no station is valid in both profiles.
    pub summary: Option<DeltaSummary>,
}

pub fn compare_profiles(
    a: &ElevationProfile,
    b: &ElevationProfile,
) -> Result<ProfileComparison, AnalyticsError> {
    if a.stations.len() != b.stations.len() {
        return Err(AnalyticsError::StationMismatch(format!(
            "{} vs {} stations; re-extract both profiles on a common line and step",
            a.stations.len(),
            b.stations.len()
        )));
    }
    if let Some(i) = a
        .stations
        .iter()
        .zip(&b.stations)
        .position(|(sa, sb)| (sa.distance_m - sb.distance_m).abs() > 1e-6)
    {
        return Err(AnalyticsError::StationMismatch(format!(
            "station {i} at {} m vs {} m; re-extract both profiles on a common line and step",
            a.stations[i].distance_m, b.stations[i].distance_m
        )));
    }
    let deltas: Vec<Option<f64>> = a
        .stations
        .iter()
        .zip(&b.stations)
        .map(|(sa, sb)| Some(sb.elevation_m? - sa.elevation_m?))
        .collect();
    let valid: Vec<f64> = deltas.iter().flatten().copied().collect();
    let summary = (!valid.is_empty()).then(|| DeltaSummary {
        mean: valid.iter().sum::<f64>() / valid.len() as f64,
        min: valid.iter().copied().fold(f64::INFINITY, f64::min),
        max: valid.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        valid_pairs: valid.len(),
    });
    Ok(ProfileComparison {
        epoch_a: a.epoch_id.clone(),
        epoch_b: b.epoch_id.clone(),
        distances_m: a.stations.iter().map(|s| s.distance_m).collect(),
        deltas,
        summary,
    })
}

/// `station_m,lat,lon,elev_m`; missing elevations are empty fields.
pub fn profile_csv(profile: &ElevationProfile) -> String {
    let mut out = String::from("station_m,lat,lon,elev_m\n");
    for s in &profile.stations {
        let _ = write!(out, "{:.3},{:.6},{:.6},", s.distance_m, s.lat, s.lon);
        if let Some(z) = s.elevation_m {
            let _ = write!(out, "{z:.3}");
        }
        out.push('\n');
    }
    out
}
