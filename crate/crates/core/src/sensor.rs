//! Nadir pinhole camera model: field of view, ground footprint and GSD.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SensorError {
    #[error("camera `{name}`: {reason}")]
    InvalidCamera { name: String, reason: String },
    #[error("altitude must be positive and finite, got {0}")]
    Altitude(f64),
    #[error("unknown camera `{0}`")]
    UnknownCamera(String),
    #[error("camera catalog: {0}")]
    Catalog(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct CameraSpec {
    pub name: String,
    pub res_x: u32,
    pub res_y: u32,
    /// Horizontal field of view in degrees, open interval (0, 180).
    pub hfov_deg: f64,
    /// Set when a value is not taken from a manufacturer datasheet.
    #[serde(default)]
    pub assumed: bool,
}

/// Ground rectangle imaged by one nadir photo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct FootprintDims {
    /// Across-track extent (sensor x axis), metres.
    pub width: f64,
    /// Along-track extent (sensor y axis), metres.
    pub height: f64,
}

impl CameraSpec {
    pub fn new(
        name: impl Into<String>,
        res_x: u32,
        res_y: u32,
        hfov_deg: f64,
        assumed: bool,
    ) -> Result<Self, SensorError> {
        let cam = CameraSpec {
            name: name.into(),
            res_x,
            res_y,
            hfov_deg,
            assumed,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<(), SensorError> {
        let bad = |reason: &str| SensorError::InvalidCamera {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.res_x == 0 || self.res_y == 0 {
            return Err(bad("resolution must be at least 1x1"));
        }
        if !(self.hfov_deg.is_finite() && self.hfov_deg > 0.0 && self.hfov_deg < 180.0) {
            return Err(bad("hfov must lie in (0, 180) degrees"));
        }
        Ok(())
    }

    /// Vertical field of view from the pinhole aspect-ratio relation.
    pub fn vfov_deg(&self) -> f64 {
        let half = (self.hfov_deg / 2.0).to_radians();
        let aspect = self.res_y as f64 / self.res_x as f64;
        2.0 * (half.tan() * aspect).atan().to_degrees()
    }

    pub fn footprint(&self, altitude_agl: f64) -> Result<FootprintDims, SensorError> {
        check_altitude(altitude_agl)?;
        // tan(vfov/2) = tan(hfov/2) * res_y/res_x, so skip the atan roundtrip
        let tan_h = (self.hfov_deg / 2.0).to_radians().tan();
        let tan_v = tan_h * self.res_y as f64 / self.res_x as f64;
        Ok(FootprintDims {
            width: 2.0 * altitude_agl * tan_h,
            height: 2.0 * altitude_agl * tan_v,
        })
    }

    /// Ground sampling distance in metres per pixel.
    pub fn gsd(&self, altitude_agl: f64) -> Result<f64, SensorError> {
        Ok(self.footprint(altitude_agl)?.width / self.res_x as f64)
    }
}

fn check_altitude(h: f64) -> Result<(), SensorError> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(SensorError::Altitude(h))
    }
}

pub fn vfov(camera: &CameraSpec) -> f64 {
    camera.vfov_deg()
}

pub fn footprint(camera: &CameraSpec, altitude_agl: f64) -> Result<FootprintDims, SensorError> {
    camera.footprint(altitude_agl)
}

pub fn gsd(camera: &CameraSpec, altitude_agl: f64) -> Result<f64, SensorError> {
    camera.gsd(altitude_agl)
}

/// Named set of cameras, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraCatalog {
    cameras: Vec<CameraSpec>,
}

#[derive(Deserialize)]
struct CatalogFile {
    #[serde(default)]
    camera: Vec<CameraSpec>,
}

/// Catalog shipped with the crate. Entries flagged `assumed` carry values
/// that are not published for that airframe.
pub const BUILTIN_CATALOG: &str = r#"# floodscout camera catalog
# hfov_deg is the horizontal field of view of the nadir image.

[[camera]]
name = "mp2"
res_x = 5472
res_y = 3648
hfov_deg = 77.0
assumed = true

[[camera]]
name = "mz2"
res_x = 4000
res_y = 3000
hfov_deg = 83.0
assumed = false

[[camera]]
name = "fpv"
res_x = 4000
res_y = 3000
hfov_deg = 150.0
assumed = true

[[camera]]
name = "insta360"
res_x = 5760
res_y = 2880
hfov_deg = 170.0
assumed = true
"#;

impl CameraCatalog {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_CATALOG).expect("built-in catalog is valid")
    }

    pub fn parse(text: &str) -> Result<Self, SensorError> {
        let file: CatalogFile =
            toml::from_str(text).map_err(|e| SensorError::Catalog(e.to_string()))?;
        let mut seen = std::collections::HashSet::new();
        for cam in &file.camera {
            cam.validate()?;
            if !seen.insert(cam.name.as_str()) {
                return Err(SensorError::Catalog(format!(
                    "duplicate camera `{}`",
                    cam.name
                )));
            }
        }
        Ok(CameraCatalog {
            cameras: file.camera,
        })
    }

    pub fn get(&self, name: &str) -> Result<&CameraSpec, SensorError> {
        self.cameras
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| SensorError::UnknownCamera(name.to_string()))
    }

    pub fn cameras(&self) -> &[CameraSpec] {
        &self.cameras
    }

    /// Canonical text form; `parse(to_text())` is the identity.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# floodscout camera catalog\n");
        for cam in &self.cameras {
            let _ = write!(
                out,
                "\n[[camera]]\nname = \"{}\"\nres_x = {}\nres_y = {}\nhfov_deg = {:?}\nassumed = {}\n",
                cam.name, cam.res_x, cam.res_y, cam.hfov_deg, cam.assumed
            );
        }
        out
    }
}
