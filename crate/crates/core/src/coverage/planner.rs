use super::{
    CoverageError, CoverageParams, CoveragePlan, FlightLine, Heading, PlanStats, SurveyPolygon,
    Waypoint, WaypointAction,
};
use crate::geodesy::{EnuPoint, MissionOrigin};
use crate::geometry::Vec2;
use crate::sensor::{CameraSpec, FootprintDims};

/// Along-track / across-track axes for a heading.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SweepFrame {
    along: Vec2,
    across: Vec2,
}

impl SweepFrame {
    pub(crate) fn new(heading_deg: f64) -> Self {
        let th = heading_deg.to_radians();
        SweepFrame {
            along: Vec2::new(th.sin(), th.cos()),
            across: Vec2::new(th.cos(), -th.sin()),
        }
    }

    /// (east, north) -> (u, v)
    pub(crate) fn to_uv(self, p: Vec2) -> Vec2 {
        Vec2::new(p.dot(self.along), p.dot(self.across))
    }

    pub(crate) fn uv_to_enu(self, u: f64, v: f64) -> Vec2 {
        self.along.scale(u).add(self.across.scale(v))
    }
}

fn bearing_deg(d: Vec2) -> f64 {
    d.x.atan2(d.y).to_degrees().rem_euclid(360.0)
}

pub(crate) fn auto_heading_enu(ring: &[Vec2]) -> f64 {
    let n = ring.len();
    let mut best = (0.0f64, 0.0f64);
    for i in 0..n {
        let d = ring[(i + 1) % n].sub(ring[i]);
        let len = d.norm();
        // strictly longer only; near-equal edges keep the earlier one
        if len > best.0 * (1.0 + 1e-9) + 1e-9 {
            best = (len, bearing_deg(d));
        }
    }
    best.1
}

/// Bearing of the polygon's longest edge, degrees clockwise from north.
/// Ties go to the first such edge in vertex order.
pub fn auto_heading(poly: &SurveyPolygon) -> f64 {
    let local = MissionOrigin {
        anchor: poly.vertices()[0],
    };
    let ring = poly
        .to_enu(&local)
        .expect("polygon vertices project around their own first vertex");
    auto_heading_enu(&ring)
}

pub(crate) fn resolve_heading(params: &CoverageParams, ring: &[Vec2]) -> f64 {
    match params.heading {
        Heading::Auto => auto_heading_enu(ring),
        Heading::Degrees(d) => d.rem_euclid(360.0),
    }
}

fn merge_intervals(mut iv: Vec<(f64, f64)>, gap: f64) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 + gap => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn edge_u_at(a: Vec2, b: Vec2, v: f64) -> f64 {
    a.x + (v - a.y) / (b.y - a.y) * (b.x - a.x)
}

fn cross_section(ring: &[Vec2], v: f64) -> Vec<(f64, f64)> {
    let n = ring.len();
    let mut xs = Vec::new();
    let mut flat = Vec::new();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if a.y == b.y {
            if a.y == v {
                flat.push((a.x.min(b.x), a.x.max(b.x)));
            }
            continue;
        }
        let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
        if v >= lo && v < hi {
            xs.push(edge_u_at(a, b, v));
        }
    }
    xs.sort_by(f64::total_cmp);
    let mut iv: Vec<(f64, f64)> = xs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    iv.extend(flat);
    merge_intervals(iv, 1e-9)
}

/// Along-track projection of the part of `ring_uv` (x = u, y = v) that lies
/// in the band `lo <= v <= hi`, as merged `(u_min, u_max)` intervals.
///
/// Between consecutive vertex ordinates the band splits into trapezoids
/// bounded by edge pairs; each trapezoid projects to the hull of its four
/// corners. A zero-height band degenerates to the exact cross-section.
pub fn swath_intervals(ring_uv: &[Vec2], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    if hi - lo <= 1e-12 {
        return cross_section(ring_uv, lo);
    }
    let mut cuts: Vec<f64> = ring_uv
        .iter()
        .map(|p| p.y)
        .filter(|&y| y > lo && y < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let n = ring_uv.len();
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let (b0, b1) = (w[0], w[1]);
        let mid = 0.5 * (b0 + b1);
        let mut spans: Vec<(f64, f64, f64)> = Vec::new();
        for i in 0..n {
            let (a, b) = (ring_uv[i], ring_uv[(i + 1) % n]);
            if a.y == b.y || a.y.min(b.y) > b0 || a.y.max(b.y) < b1 {
                continue;
            }
            spans.push((
                edge_u_at(a, b, mid),
                edge_u_at(a, b, b0),
                edge_u_at(a, b, b1),
            ));
        }
        spans.sort_by(|p, q| p.0.total_cmp(&q.0));
        for pair in spans.chunks_exact(2) {
            let us = [pair[0].1, pair[0].2, pair[1].1, pair[1].2];
            let umin = us.iter().copied().fold(f64::INFINITY, f64::min);
            let umax = us.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            pieces.push((umin, umax));
        }
    }
    merge_intervals(pieces, 1e-9)
}

/// Row offsets across track: the first row half a spacing inside the
/// minimum, then one spacing apart. The last row is pulled back inside
/// the polygon when the regular step would put it outside.
pub(crate) fn row_offsets(vmin: f64, vmax: f64, spacing: f64) -> Vec<f64> {
    let extent = vmax - vmin;
    let n = ((extent / spacing) - 1e-9).ceil().max(1.0) as usize;
    if n == 1 {
        return vec![0.5 * (vmin + vmax)];
    }
    (0..n)
        .map(|k| {
            let v = vmin + spacing * (0.5 + k as f64);
            if k == n - 1 && v >= vmax {
                vmax - 0.5 * spacing
            } else {
                v
            }
        })
        .collect()
}

/// Photo stations on a line: the start, every `trigger` metres, and the end.
pub(crate) fn photos_along(line: &FlightLine, trigger: f64) -> Vec<EnuPoint> {
    let len = line.length();
    let mut out = Vec::new();
    let dir = if len > 0.0 {
        Vec2::new(
            (line.end.east - line.start.east) / len,
            (line.end.north - line.start.north) / len,
        )
    } else {
        Vec2::default()
    };
    let steps = (len / trigger + 1e-9).floor() as usize;
    for k in 0..=steps {
        let d = (k as f64 * trigger).min(len);
        out.push(EnuPoint::new(
            line.start.east + dir.x * d,
            line.start.north + dir.y * d,
            line.start.up,
        ));
    }
    if len - steps as f64 * trigger > 1e-6 {
        out.push(line.end);
    }
    out
}

pub(crate) fn stats_for(
    lines: &[FlightLine],
    trigger: f64,
    params: &CoverageParams,
    gsd: f64,
) -> PlanStats {
    if lines.is_empty() {
        return PlanStats::default();
    }
    let mut path = 0.0;
    let mut photos = 0;
    for (i, l) in lines.iter().enumerate() {
        path += l.length();
        photos += photos_along(l, trigger).len();
        if let Some(next) = lines.get(i + 1) {
            path += Vec2::new(next.start.east - l.end.east, next.start.north - l.end.north).norm();
        }
    }
    PlanStats {
        total_path_m: path,
        est_flight_s: path / params.cruise_speed + (lines.len() - 1) as f64 * params.turn_penalty,
        photo_count: photos,
        line_count: lines.len(),
        est_gsd: gsd,
    }
}

/// Stats for a set of flight lines flown in order.
pub fn estimate_stats(
    lines: &[FlightLine],
    params: &CoverageParams,
    cam: &CameraSpec,
) -> Result<PlanStats, CoverageError> {
    params.validate()?;
    let fp = cam.footprint(params.altitude_agl)?;
    let trigger = fp.height * (1.0 - params.front_overlap);
    Ok(stats_for(
        lines,
        trigger,
        params,
        cam.gsd(params.altitude_agl)?,
    ))
}

pub(crate) struct PlanContext {
    pub origin: MissionOrigin,
    pub params: CoverageParams,
    pub heading_deg: f64,
    pub footprint: FootprintDims,
    pub line_spacing: f64,
    pub trigger_distance: f64,
    pub gsd: f64,
}

impl PlanContext {
    pub(crate) fn of(plan: &CoveragePlan) -> Self {
        PlanContext {
            origin: plan.origin,
            params: plan.params,
            heading_deg: plan.heading_deg,
            footprint: plan.footprint,
            line_spacing: plan.line_spacing,
            trigger_distance: plan.trigger_distance,
            gsd: plan.stats.est_gsd,
        }
    }

    /// Derives photos, waypoints and stats for `lines`.
    pub(crate) fn assemble(&self, lines: Vec<FlightLine>) -> Result<CoveragePlan, CoverageError> {
        let photo_positions = lines
            .iter()
            .flat_map(|l| photos_along(l, self.trigger_distance))
            .collect();
        let mut waypoints = Vec::with_capacity(lines.len() * 2);
        for l in &lines {
            for (p, action) in [
                (l.start, WaypointAction::LineStart),
                (l.end, WaypointAction::LineEnd),
            ] {
                waypoints.push(Waypoint {
                    position: self.origin.enu_to_wgs84(&p)?,
                    action,
                });
            }
        }
        let stats = stats_for(&lines, self.trigger_distance, &self.params, self.gsd);
        Ok(CoveragePlan {
            origin: self.origin,
            params: self.params,
            heading_deg: self.heading_deg,
            altitude_agl: self.params.altitude_agl,
            footprint: self.footprint,
            line_spacing: self.line_spacing,
            trigger_distance: self.trigger_distance,
            lines,
            photo_positions,
            waypoints,
            stats,
        })
    }
}

/// Plans a meander survey of `poly` in the frame of `origin`.
pub fn plan_coverage(
    poly: &SurveyPolygon,
    cam: &CameraSpec,
    params: &CoverageParams,
    origin: &MissionOrigin,
) -> Result<CoveragePlan, CoverageError> {
    params.validate()?;
    cam.validate()?;
    let footprint = cam.footprint(params.altitude_agl)?;
    let spacing = footprint.width * (1.0 - params.side_overlap);
    let trigger = footprint.height * (1.0 - params.front_overlap);
    let ring = poly.to_enu(origin)?;
    let heading_deg = resolve_heading(params, &ring);
    let frame = SweepFrame::new(heading_deg);
    let ring_uv: Vec<Vec2> = ring.iter().map(|p| frame.to_uv(*p)).collect();

    let vmin = ring_uv.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let vmax = ring_uv
        .iter()
        .map(|p| p.y)
        .fold(f64::NEG_INFINITY, f64::max);
    let half_h = 0.5 * footprint.height;
    let up = params.altitude_agl;

    let mut lines = Vec::new();
    for (row, v) in row_offsets(vmin, vmax, spacing).into_iter().enumerate() {
        let lo = (v - 0.5 * spacing).max(vmin);
        let hi = (v + 0.5 * spacing).min(vmax);
        let extended: Vec<(f64, f64)> = swath_intervals(&ring_uv, lo, hi)
            .into_iter()
            .map(|(a, b)| (a - half_h, b + half_h))
            .collect();
        let mut segs = merge_intervals(extended, 0.0);
        let forward = row % 2 == 0;
        if !forward {
            segs.reverse();
        }
        for (a, b) in segs {
            let (u0, u1) = if forward { (a, b) } else { (b, a) };
            let s = frame.uv_to_enu(u0, v);
            let e = frame.uv_to_enu(u1, v);
            lines.push(FlightLine {
                row,
                start: EnuPoint::new(s.x, s.y, up),
                end: EnuPoint::new(e.x, e.y, up),
            });
        }
    }

    PlanContext {
        origin: *origin,
        params: *params,
        heading_deg,
        footprint,
        line_spacing: spacing,
        trigger_distance: trigger,
        gsd: cam.gsd(params.altitude_agl)?,
    }
    .assemble(lines)
}
