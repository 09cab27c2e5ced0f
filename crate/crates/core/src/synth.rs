//! Synthetic terrains and epoch pairs with known ground truth.
//!
//! Terrains live on the rectangle `[0, width] × [0, height]` of the mission
//! ENU frame. Sampling is deterministic for a given seed.

use crate::dem::{write_xyz, PointCloud};
use crate::geodesy::{EnuPoint, GeoPoint, MissionOrigin};
use crate::geometry::{point_in_polygon, Vec2};
use chrono::{DateTime, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const DEFAULT_NOISE_SIGMA: f64 = 0.02;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TerrainKind {
    Flat {
        z0: f64,
    },
    /// `z0 + gx·east + gy·north`
    Plane {
        gx: f64,
        gy: f64,
        z0: f64,
    },
    /// Raised-cosine trough of the given depth and full width whose axis runs
    /// through the extent centre along compass bearing `axis_deg`.
    Valley {
        depth: f64,
        width: f64,
        axis_deg: f64,
    },
    /// Sum of the parts.
    Composite {
        parts: Vec<TerrainKind>,
    },
}

impl TerrainKind {
    fn check(&self) -> Result<(), SynthError> {
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        let ok = match self {
            TerrainKind::Flat { z0 } => finite(&[*z0]),
            TerrainKind::Plane { gx, gy, z0 } => finite(&[*gx, *gy, *z0]),
            TerrainKind::Valley {
                depth,
                width,
                axis_deg,
            } => finite(&[*depth, *width, *axis_deg]) && *width > 0.0,
            TerrainKind::Composite { parts } => {
                return parts.iter().try_for_each(TerrainKind::check)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SynthError::Invalid(format!(
                "bad terrain parameters {self:?}"
            )))
        }
    }

    fn eval(&self, e: f64, n: f64, center: (f64, f64)) -> f64 {
        match self {
            TerrainKind::Flat { z0 } => *z0,
            TerrainKind::Plane { gx, gy, z0 } => z0 + gx * e + gy * n,
            TerrainKind::Valley {
                depth,
                width,
                axis_deg,
            } => {
                let a = axis_deg.to_radians();
                // distance across the axis
                let d = ((e - center.0) * a.cos() - (n - center.1) * a.sin()).abs();
                let half = width / 2.0;
                if d >= half {
                    0.0
                } else {
                    -depth * 0.5 * (1.0 + (std::f64::consts::PI * d / half).cos())
                }
            }
            TerrainKind::Composite { parts } => parts.iter().map(|p| p.eval(e, n, center)).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct TerrainSpec {
    pub terrain: TerrainKind,
    /// Width (east) and height (north) in metres.
    pub extent: [f64; 2],
    pub seed: u64,
}

impl TerrainSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !self.extent.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(SynthError::Invalid(format!(
                "extent must be positive, got {:?}",
                self.extent
            )));
        }
        self.terrain.check()
    }

    pub fn elevation(&self, east: f64, north: f64) -> f64 {
        self.terrain
            .eval(east, north, (self.extent[0] / 2.0, self.extent[1] / 2.0))
    }
}

fn sample_surface(
    spec: &TerrainSpec,
    density: f64,
    noise_sigma: f64,
    surface: impl Fn(f64, f64) -> f64,
) -> Result<PointCloud, SynthError> {
    spec.validate()?;
    if !(density.is_finite() && density > 0.0) {
        return Err(SynthError::Invalid(format!(
            "density must be positive, got {density}"
        )));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(SynthError::Invalid(format!(
            "noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    let [w, h] = spec.extent;
    let count = (density * w * h).round().max(1.0) as usize;
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| SynthError::Invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let e = rng.random::<f64>() * w;
        let n = rng.random::<f64>() * h;
        let z = surface(e, n) + noise.sample(&mut rng);
        points.push(EnuPoint::new(e, n, z));
    }
    PointCloud::new(points).map_err(|e| SynthError::Invalid(e.to_string()))
}

/// Uniformly scattered points on the terrain with Gaussian vertical noise.
pub fn sample_terrain(
    spec: &TerrainSpec,
    density: f64,
    noise_sigma: f64,
) -> Result<PointCloud, SynthError> {
    sample_surface(spec, density, noise_sigma, |e, n| spec.elevation(e, n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct EpochPairSpec {
    pub terrain: TerrainSpec,
    pub water_level_a: f64,
    pub water_level_b: f64,
    /// Polygon in ENU metres where the flat water surface applies.
    pub water_region: Vec<Vec2>,
    pub point_density: f64,
    pub noise_sigma: f64,
}

impl EpochPairSpec {
    /// Ground truth surface of one epoch.
    pub fn surface(&self, level: f64, east: f64, north: f64) -> f64 {
        let z = self.terrain.elevation(east, north);
        if point_in_polygon(Vec2::new(east, north), &self.water_region) {
            z.max(level)
        } else {
            z
        }
    }
}

/// Both epochs use the terrain seed, so they share point positions and
/// noise; only the water level differs.
pub fn make_epoch_pair(spec: &EpochPairSpec) -> Result<(PointCloud, PointCloud), SynthError> {
    if !(spec.water_level_a.is_finite() && spec.water_level_b.is_finite()) {
        return Err(SynthError::Invalid("water levels must be finite".into()));
    }
    if spec.water_region.len() < 3 {
        return Err(SynthError::Invalid(
            "water region needs at least 3 vertices".into(),
        ));
    }
    let a = sample_surface(
        &spec.terrain,
        spec.point_density,
        spec.noise_sigma,
        |e, n| spec.surface(spec.water_level_a, e, n),
    )?;
    let b = sample_surface(
        &spec.terrain,
        spec.point_density,
        spec.noise_sigma,
        |e, n| spec.surface(spec.water_level_b, e, n),
    )?;
    Ok((a, b))
}

pub const PRESETS: &[&str] = &["blessem-breach"];

/// A preset: the pair, where it sits on earth, and when each epoch was taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct Scenario {
    pub name: String,
    pub origin: MissionOrigin,
    pub pair: EpochPairSpec,
    pub captured_at_a: DateTime<Utc>,
    pub captured_at_b: DateTime<Utc>,
}

/// Ground truth written next to generated clouds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct GroundTruth {
    pub preset: String,
    /// `b − a` inside the water region wherever water covers terrain in both epochs.
    pub true_delta_m: f64,
    pub water_level_a: f64,
    pub water_level_b: f64,
    pub region: Vec<Vec2>,
    pub region_wgs84: Vec<GeoPoint>,
    pub origin: MissionOrigin,
    pub extent: [f64; 2],
    pub point_density: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub captured_at_a: DateTime<Utc>,
    pub captured_at_b: DateTime<Utc>,
}

impl Scenario {
    pub fn ground_truth(&self) -> GroundTruth {
        let p = &self.pair;
        GroundTruth {
            preset: self.name.clone(),
            true_delta_m: p.water_level_b - p.water_level_a,
            water_level_a: p.water_level_a,
            water_level_b: p.water_level_b,
            region: p.water_region.clone(),
            region_wgs84: p
                .water_region
                .iter()
                .map(|v| {
                    self.origin
                        .enu_to_wgs84(&EnuPoint::new(v.x, v.y, 0.0))
                        .expect("preset region lies near its origin")
                })
                .collect(),
            origin: self.origin,
            extent: p.terrain.extent,
            point_density: p.point_density,
            noise_sigma: p.noise_sigma,
            seed: p.terrain.seed,
            captured_at_a: self.captured_at_a,
            captured_at_b: self.captured_at_b,
        }
    }
}

/// Breached flood basin: a 150 m square entirely under water whose level
/// falls by `drop_m` between two flights a day apart.
pub fn blessem_breach(drop_m: f64) -> Result<Scenario, SynthError> {
    if !(drop_m.is_finite() && drop_m >= 0.0) {
        return Err(SynthError::Invalid(format!(
            "drop must be >= 0, got {drop_m}"
        )));
    }
    let side = 150.0;
    let terrain = TerrainSpec {
        terrain: TerrainKind::Composite {
            parts: vec![
                TerrainKind::Plane {
                    gx: 0.004,
                    gy: -0.002,
                    z0: 50.0,
                },
                TerrainKind::Valley {
                    depth: 3.0,
                    width: 60.0,
                    axis_deg: 30.0,
                },
            ],
        },
        extent: [side, side],
        seed: 20210715,
    };
    // terrain tops out at 50.6 m, so both levels cover all of it
    let level_b = 51.0;
    Ok(Scenario {
        name: "blessem-breach".into(),
        origin: MissionOrigin::new(GeoPoint::new(50.806, 6.765, 0.0).expect("valid anchor"))
            .expect("valid anchor"),
        pair: EpochPairSpec {
            terrain,
            water_level_a: level_b + drop_m,
            water_level_b: level_b,
            water_region: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(side, 0.0),
                Vec2::new(side, side),
                Vec2::new(0.0, side),
            ],
            point_density: 10.0,
            noise_sigma: DEFAULT_NOISE_SIGMA,
        },
        captured_at_a: Utc.with_ymd_and_hms(2021, 7, 16, 12, 0, 0).unwrap(),
        captured_at_b: Utc.with_ymd_and_hms(2021, 7, 17, 12, 0, 0).unwrap(),
    })
}

/// Writes `epoch1.xyz`, `epoch2.xyz` (ENU around the scenario origin) and
/// `ground_truth.json` into `dir`.
pub fn write_scenario_files(
    scenario: &Scenario,
    a: &PointCloud,
    b: &PointCloud,
    dir: &Path,
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        dir.join("epoch1.xyz"),
        dir.join("epoch2.xyz"),
        dir.join("ground_truth.json"),
    ];
    std::fs::write(&files[0], write_xyz(&a.points, &scenario.origin))?;
    std::fs::write(&files[1], write_xyz(&b.points, &scenario.origin))?;
    let mut truth =
        serde_json::to_string_pretty(&scenario.ground_truth()).expect("ground truth serializes");
    truth.push('\n');
    std::fs::write(&files[2], truth)?;
    Ok(files.to_vec())
}

pub fn preset(name: &str, drop_m: f64) -> Result<Scenario, SynthError> {
    match name {
        "blessem-breach" => blessem_breach(drop_m),
        other => Err(SynthError::UnknownPreset(other.to_string())),
    }
}
