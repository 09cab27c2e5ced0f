//! ASCII `.xyz` point clouds.
//!
//! One point per line, whitespace or comma separated; columns beyond the
//! third are ignored. `#` starts a comment. A leading directive selects the
//! coordinate system:
//!
//! ```text
//! #crs wgs84                 -> lines are `lat lon alt`
//! #crs enu <lat0> <lon0> <alt0> -> lines are `east north up` around that anchor
//! ```
//!
//! Without a directive, lines are `east north up` in the mission frame.

use super::DemError;
use crate::geodesy::{EnuPoint, GeoPoint, MissionOrigin};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CloudCrs {
    /// Local frame; `None` means the mission origin.
    Enu(Option<GeoPoint>),
    Wgs84,
}

/// Parsed file contents before conversion to the mission frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCloud {
    pub crs: CloudCrs,
    pub coords: Vec<[f64; 3]>,
    /// Lines with NaN or infinite coordinates that were dropped.
    pub rejected: usize,
}

/// Points in the mission ENU frame; never empty, always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<EnuPoint>,
    pub rejected: usize,
}

impl PointCloud {
    /// Drops non-finite points, counting them in `rejected`.
    pub fn new(points: Vec<EnuPoint>) -> Result<Self, DemError> {
        let total = points.len();
        let points: Vec<EnuPoint> = points.into_iter().filter(EnuPoint::is_finite).collect();
        if points.is_empty() {
            return Err(DemError::EmptyCloud);
        }
        Ok(PointCloud {
            rejected: total - points.len(),
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl RawCloud {
    pub fn into_enu(self, mission: &MissionOrigin) -> Result<PointCloud, DemError> {
        let points = match self.crs {
            CloudCrs::Enu(None) => self
                .coords
                .iter()
                .map(|c| EnuPoint::new(c[0], c[1], c[2]))
                .collect(),
            CloudCrs::Enu(Some(anchor)) if anchor == mission.anchor => self
                .coords
                .iter()
                .map(|c| EnuPoint::new(c[0], c[1], c[2]))
                .collect(),
            CloudCrs::Enu(Some(anchor)) => {
                let local = MissionOrigin::new(anchor)?;
                self.coords
                    .iter()
                    .map(|c| {
                        let g = local.enu_to_wgs84(&EnuPoint::new(c[0], c[1], c[2]))?;
                        mission.wgs84_to_enu(&g)
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            CloudCrs::Wgs84 => self
                .coords
                .iter()
                .map(|c| mission.wgs84_to_enu(&GeoPoint::new(c[0], c[1], c[2])?))
                .collect::<Result<Vec<_>, _>>()?,
        };
        let mut cloud = PointCloud::new(points)?;
        cloud.rejected += self.rejected;
        Ok(cloud)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> DemError {
    DemError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_xyz(text: &str) -> Result<RawCloud, DemError> {
    let mut crs = CloudCrs::Enu(None);
    let mut coords = Vec::new();
    let mut rejected = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut toks = rest.split_whitespace();
            if toks.next() == Some("crs") {
                if !coords.is_empty() || rejected > 0 {
                    return Err(parse_err(lineno, "#crs directive must precede data"));
                }
                crs = match toks.next() {
                    Some("wgs84") => CloudCrs::Wgs84,
                    Some("enu") => {
                        let nums: Vec<f64> = toks
                            .map(str::parse::<f64>)
                            .collect::<Result<_, _>>()
                            .map_err(|e| parse_err(lineno, format!("bad enu anchor: {e}")))?;
                        match nums.as_slice() {
                            [] => CloudCrs::Enu(None),
                            [lat, lon] => CloudCrs::Enu(Some(
                                GeoPoint::new(*lat, *lon, 0.0)
                                    .map_err(|e| parse_err(lineno, e.to_string()))?,
                            )),
                            [lat, lon, alt] => CloudCrs::Enu(Some(
                                GeoPoint::new(*lat, *lon, *alt)
                                    .map_err(|e| parse_err(lineno, e.to_string()))?,
                            )),
                            _ => return Err(parse_err(lineno, "enu anchor needs lat lon [alt]")),
                        }
                    }
                    other => {
                        return Err(parse_err(
                            lineno,
                            format!("unknown crs {:?}", other.unwrap_or("")),
                        ))
                    }
                };
            }
            continue;
        }
        let toks: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if toks.len() < 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 columns, found {}", toks.len()),
            ));
        }
        let mut p = [0.0; 3];
        for (slot, tok) in p.iter_mut().zip(&toks[..3]) {
            *slot = tok
                .parse::<f64>()
                .map_err(|_| parse_err(lineno, format!("`{tok}` is not a number")))?;
        }
        if p.iter().all(|v| v.is_finite()) {
            coords.push(p);
        } else {
            rejected += 1;
        }
    }
    if coords.is_empty() {
        return Err(DemError::EmptyCloud);
    }
    Ok(RawCloud {
        crs,
        coords,
        rejected,
    })
}

pub fn read_xyz(path: impl AsRef<Path>) -> Result<RawCloud, DemError> {
    parse_xyz(&std::fs::read_to_string(path)?)
}

/// Writes ENU points with a `#crs enu` header naming `origin`.
pub fn write_xyz(points: &[EnuPoint], origin: &MissionOrigin) -> String {
    let a = origin.anchor;
    let mut out = format!("#crs enu {:.9} {:.9} {:.3}\n", a.lat, a.lon, a.alt);
    out.reserve(points.len() * 28);
    for p in points {
        let _ = writeln!(out, "{:.3} {:.3} {:.3}", p.east, p.north, p.up);
    }
    out
}
