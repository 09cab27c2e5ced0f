use super::{CoverageError, CoverageParams, CoveragePlan, Heading, SurveyPolygon};
use crate::geometry::{point_in_polygon, Vec2};
use crate::sensor::CameraSpec;
use std::collections::HashMap;

/// Grid pitch of the coverage check, metres.
const SAMPLE_PITCH: f64 = 1.0;

/// Fraction of the polygon interior imaged by at least one photo.
///
/// Samples the polygon on a 1 m lattice in the sweep frame and tests each
/// sample against every nearby photo footprint rectangle (width across
/// track, height along track, centred on the photo position). Works only
/// from the photo positions, so it checks the plan independently of how
/// the lines were generated.
pub fn verify_coverage(
    plan: &CoveragePlan,
    poly: &SurveyPolygon,
    cam: &CameraSpec,
    params: &CoverageParams,
) -> Result<f64, CoverageError> {
    let fp = cam.footprint(params.altitude_agl)?;
    let heading = match params.heading {
        Heading::Degrees(d) => d,
        Heading::Auto => plan.heading_deg,
    }
    .to_radians();
    let (s, c) = heading.sin_cos();
    // u along the heading, v to its right
    let to_uv = |e: f64, n: f64| Vec2::new(e * s + n * c, e * c - n * s);

    let ring: Vec<Vec2> = poly
        .to_enu(&plan.origin)?
        .iter()
        .map(|p| to_uv(p.x, p.y))
        .collect();
    let half_u = 0.5 * fp.height + 1e-6;
    let half_v = 0.5 * fp.width + 1e-6;

    let bucket = |p: Vec2| {
        (
            (p.x / fp.height).floor() as i64,
            (p.y / fp.width).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<Vec2>> = HashMap::new();
    for ph in &plan.photo_positions {
        let p = to_uv(ph.east, ph.north);
        grid.entry(bucket(p)).or_default().push(p);
    }

    let umin = ring.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let umax = ring.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let vmin = ring.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let vmax = ring.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let nu = ((umax - umin) / SAMPLE_PITCH).ceil() as usize;
    let nv = ((vmax - vmin) / SAMPLE_PITCH).ceil() as usize;

    let (mut total, mut covered) = (0usize, 0usize);
    for j in 0..nv {
        let v = vmin + (j as f64 + 0.5) * SAMPLE_PITCH;
        for i in 0..nu {
            let p = Vec2::new(umin + (i as f64 + 0.5) * SAMPLE_PITCH, v);
            if !point_in_polygon(p, &ring) {
                continue;
            }
            total += 1;
            let (bu, bv) = bucket(p);
            let hit = (bu - 1..=bu + 1).any(|a| {
                (bv - 1..=bv + 1).any(|b| {
                    grid.get(&(a, b)).is_some_and(|photos| {
                        photos
                            .iter()
                            .any(|q| (p.x - q.x).abs() <= half_u && (p.y - q.y).abs() <= half_v)
                    })
                })
            });
            if hit {
                covered += 1;
            }
        }
    }
    if total == 0 {
        return Ok(1.0);
    }
    Ok(covered as f64 / total as f64)
}
