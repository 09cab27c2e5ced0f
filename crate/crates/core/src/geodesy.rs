//! WGS84 geodetic coordinates and the local East-North-Up frame.
//!
//! All planar math in the crate happens in ENU metres relative to a
//! [`MissionOrigin`]. The projection is a spherical-earth tangent plane
//! (R = 6 371 000 m), valid within [`VALIDITY_RADIUS_M`] of the origin.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean earth radius used by every conversion in this crate.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Horizontal distance from the origin beyond which the tangent-plane
/// approximation is rejected.
pub const VALIDITY_RADIUS_M: f64 = 50_000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesyError {
    #[error("latitude {0} outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    Longitude(f64),
    #[error("non-finite coordinate component")]
    NonFinite,
    #[error("point is {distance_m:.0} m from the mission origin (limit {limit_m:.0} m)")]
    OutOfRange { distance_m: f64, limit_m: f64 },
}

/// Geodetic position in degrees, altitude in metres above the ellipsoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
    #[serde(default)]
    pub alt: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64, alt: f64) -> Result<Self, GeodesyError> {
        let p = GeoPoint { lat, lon, alt };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GeodesyError> {
        if !(self.lat.is_finite() && self.lon.is_finite() && self.alt.is_finite()) {
            return Err(GeodesyError::NonFinite);
        }
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(GeodesyError::Latitude(self.lat));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(GeodesyError::Longitude(self.lon));
        }
        Ok(())
    }
}

/// Local tangent-plane position in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct EnuPoint {
    pub east: f64,
    pub north: f64,
    #[serde(default)]
    pub up: f64,
}

impl EnuPoint {
    pub const fn new(east: f64, north: f64, up: f64) -> Self {
        EnuPoint { east, north, up }
    }

    pub fn is_finite(&self) -> bool {
        self.east.is_finite() && self.north.is_finite() && self.up.is_finite()
    }

    pub fn horizontal_norm(&self) -> f64 {
        self.east.hypot(self.north)
    }
}

/// What to do with points beyond [`VALIDITY_RADIUS_M`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangePolicy {
    /// Reject with [`GeodesyError::OutOfRange`].
    #[default]
    Strict,
    /// Convert anyway and flag the result.
    Warn,
}

/// A converted point together with the tangent-plane validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projected {
    pub point: EnuPoint,
    pub beyond_validity: bool,
}

/// Anchor of a mission's local frame. Every epoch of a mission shares it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct MissionOrigin {
    pub anchor: GeoPoint,
}

impl MissionOrigin {
    pub fn new(anchor: GeoPoint) -> Result<Self, GeodesyError> {
        anchor.validate()?;
        Ok(MissionOrigin { anchor })
    }

    pub fn wgs84_to_enu(&self, p: &GeoPoint) -> Result<EnuPoint, GeodesyError> {
        self.wgs84_to_enu_with(p, RangePolicy::Strict)
            .map(|pr| pr.point)
    }

    pub fn wgs84_to_enu_with(
        &self,
        p: &GeoPoint,
        policy: RangePolicy,
    ) -> Result<Projected, GeodesyError> {
        p.validate()?;
        let a = &self.anchor;
        let lat0 = a.lat.to_radians();
        let dlat = (p.lat - a.lat).to_radians();
        let dlon = wrap_degrees(p.lon - a.lon).to_radians();
        let point = EnuPoint {
            east: EARTH_RADIUS_M * lat0.cos() * dlon,
            north: EARTH_RADIUS_M * dlat,
            up: p.alt - a.alt,
        };
        let distance_m = point.horizontal_norm();
        let beyond_validity = distance_m > VALIDITY_RADIUS_M;
        if beyond_validity && policy == RangePolicy::Strict {
            return Err(GeodesyError::OutOfRange {
                distance_m,
                limit_m: VALIDITY_RADIUS_M,
            });
        }
        Ok(Projected {
            point,
            beyond_validity,
        })
    }

    /// Inverse of [`MissionOrigin::wgs84_to_enu`] under the same spherical model.
    pub fn enu_to_wgs84(&self, v: &EnuPoint) -> Result<GeoPoint, GeodesyError> {
        if !v.is_finite() {
            return Err(GeodesyError::NonFinite);
        }
        let a = &self.anchor;
        let lat0 = a.lat.to_radians();
        let lat = a.lat + (v.north / EARTH_RADIUS_M).to_degrees();
        let lon = wrap_degrees(a.lon + (v.east / (EARTH_RADIUS_M * lat0.cos())).to_degrees());
        GeoPoint::new(lat, lon, a.alt + v.up)
    }
}

/// Free-function form of [`MissionOrigin::wgs84_to_enu`].
pub fn wgs84_to_enu(p: &GeoPoint, origin: &MissionOrigin) -> Result<EnuPoint, GeodesyError> {
    origin.wgs84_to_enu(p)
}

/// Free-function form of [`MissionOrigin::enu_to_wgs84`].
pub fn enu_to_wgs84(v: &EnuPoint, origin: &MissionOrigin) -> Result<GeoPoint, GeodesyError> {
    origin.enu_to_wgs84(v)
}

/// Haversine great-circle distance in metres; altitude is ignored.
pub fn geodesic_distance(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = lat2 - lat1;
    let dlon = wrap_degrees(b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

fn wrap_degrees(d: f64) -> f64 {
    if (-180.0..=180.0).contains(&d) {
        d
    } else {
        (d + 180.0).rem_euclid(360.0) - 180.0
    }
}
