use floodscout_core::coverage::{
    export_waypoints, partition_sorties, plan_coverage, swath_intervals, verify_coverage,
    CoverageParams, Heading, SurveyPolygon, WaypointDocument,
};
use floodscout_core::geodesy::{GeoPoint, MissionOrigin};
use floodscout_core::geometry::{convex_hull, Vec2};
use floodscout_core::sensor::{CameraCatalog, CameraSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn origin() -> MissionOrigin {
    MissionOrigin::new(GeoPoint::new(50.806, 6.765, 0.0).unwrap()).unwrap()
}

fn mz2() -> CameraSpec {
    CameraCatalog::builtin().get("mz2").unwrap().clone()
}

fn convex(rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    let (w, h) = (
        rng.random_range(200.0..600.0),
        rng.random_range(200.0..600.0),
    );
    loop {
        let pts: Vec<Vec2> = (0..12)
            .map(|_| Vec2::new(rng.random_range(0.0..w), rng.random_range(0.0..h)))
            .collect();
        let hull = convex_hull(&pts);
        if hull.len() >= 3 {
            return hull;
        }
    }
}

fn l_shape(rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    let (w, h) = (
        rng.random_range(200.0..600.0),
        rng.random_range(200.0..600.0),
    );
    let (cw, ch) = (
        w * rng.random_range(0.3..0.7),
        h * rng.random_range(0.3..0.7),
    );
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let (s, c) = a.sin_cos();
    [
        (0.0, 0.0),
        (w, 0.0),
        (w, h - ch),
        (w - cw, h - ch),
        (w - cw, h),
        (0.0, h),
    ]
    .iter()
    .map(|&(x, y)| Vec2::new(x * c - y * s, x * s + y * c))
    .collect()
}

/// Independent photo count for a line of length `len`: both ends plus one
/// photo per started trigger interval.
fn photos_on_line(len: f64, trigger: f64) -> usize {
    let k = len / trigger;
    if (k - k.round()).abs() < 1e-9 {
        k.round() as usize + 1
    } else {
        k.ceil() as usize + 1
    }
}

#[test]
fn photo_count_matches_line_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let poly = SurveyPolygon::from_enu(&convex(&mut rng), &origin()).unwrap();
        let params = CoverageParams {
            front_overlap: rng.random_range(0.2..0.9),
            side_overlap: rng.random_range(0.2..0.9),
            ..Default::default()
        };
        let plan = plan_coverage(&poly, &mz2(), &params, &origin()).unwrap();
        let expect: usize = plan
            .lines
            .iter()
            .map(|l| photos_on_line(l.length(), plan.trigger_distance))
            .sum();
        assert_eq!(plan.stats.photo_count, expect);
        assert_eq!(plan.photo_positions.len(), expect);
    }
}

#[test]
fn random_polygons_are_fully_covered() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..8 {
        let ring = if i % 2 == 0 {
            convex(&mut rng)
        } else {
            l_shape(&mut rng)
        };
        let poly = SurveyPolygon::from_enu(&ring, &origin()).unwrap();
        let params = CoverageParams {
            side_overlap: rng.random_range(0.2..0.9),
            front_overlap: rng.random_range(0.2..0.9),
            heading: Heading::Degrees(rng.random_range(0.0..180.0)),
            ..Default::default()
        };
        let plan = plan_coverage(&poly, &mz2(), &params, &origin()).unwrap();
        let c = verify_coverage(&plan, &poly, &mz2(), &params).unwrap();
        assert_eq!(c, 1.0, "polygon {i} {ring:?} {params:?}");
    }
}

#[test]
fn line_and_photo_counts_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for ring in [convex(&mut rng), l_shape(&mut rng)] {
        let poly = SurveyPolygon::from_enu(&ring, &origin()).unwrap();
        let grid: Vec<f64> = (0..10).map(|i| 0.2 + 0.7 * i as f64 / 9.0).collect();
        let plan = |side: f64, front: f64| {
            let p = CoverageParams {
                side_overlap: side,
                front_overlap: front,
                heading: Heading::Degrees(20.0),
                ..Default::default()
            };
            plan_coverage(&poly, &mz2(), &p, &origin()).unwrap().stats
        };
        let table: Vec<Vec<_>> = grid
            .iter()
            .map(|&s| grid.iter().map(|&f| plan(s, f)).collect())
            .collect();
        for i in 0..10 {
            for j in 0..10 {
                if i > 0 {
                    assert!(table[i][j].line_count >= table[i - 1][j].line_count);
                }
                if j > 0 {
                    assert!(table[i][j].photo_count >= table[i][j - 1].photo_count);
                }
            }
        }
    }
}

#[test]
fn translation_moves_every_waypoint() {
    let o = origin();
    let ring = [
        Vec2::new(0.0, 0.0),
        Vec2::new(300.0, 20.0),
        Vec2::new(260.0, 240.0),
        Vec2::new(-30.0, 200.0),
    ];
    let d = Vec2::new(123.4, -56.7);
    let moved: Vec<Vec2> = ring.iter().map(|p| p.add(d)).collect();
    let params = CoverageParams {
        heading: Heading::Degrees(35.0),
        ..Default::default()
    };
    let a = plan_coverage(
        &SurveyPolygon::from_enu(&ring, &o).unwrap(),
        &mz2(),
        &params,
        &o,
    )
    .unwrap();
    let b = plan_coverage(
        &SurveyPolygon::from_enu(&moved, &o).unwrap(),
        &mz2(),
        &params,
        &o,
    )
    .unwrap();
    assert_eq!(a.lines.len(), b.lines.len());
    for (la, lb) in a.lines.iter().zip(&b.lines) {
        for (pa, pb) in [(la.start, lb.start), (la.end, lb.end)] {
            assert!((pb.east - pa.east - d.x).abs() < 1e-3);
            assert!((pb.north - pa.north - d.y).abs() < 1e-3);
        }
    }
}

#[test]
fn cyclic_vertex_rotation_gives_same_plan() {
    let o = origin();
    let ring = vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(300.0, 20.0),
        Vec2::new(260.0, 240.0),
        Vec2::new(-30.0, 200.0),
    ];
    let params = CoverageParams {
        heading: Heading::Degrees(80.0),
        ..Default::default()
    };
    let base = plan_coverage(
        &SurveyPolygon::from_enu(&ring, &o).unwrap(),
        &mz2(),
        &params,
        &o,
    )
    .unwrap();
    for k in 1..ring.len() {
        let mut r = ring.clone();
        r.rotate_left(k);
        let p = plan_coverage(
            &SurveyPolygon::from_enu(&r, &o).unwrap(),
            &mz2(),
            &params,
            &o,
        )
        .unwrap();
        assert_eq!(p.lines.len(), base.lines.len());
        for (a, b) in p.lines.iter().zip(&base.lines) {
            assert!(
                (a.start.east - b.start.east).abs() < 1e-3
                    && (a.start.north - b.start.north).abs() < 1e-3
            );
            assert!(
                (a.end.east - b.end.east).abs() < 1e-3 && (a.end.north - b.end.north).abs() < 1e-3
            );
        }
    }
}

#[test]
fn consecutive_rows_alternate_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..6 {
        let poly = SurveyPolygon::from_enu(&convex(&mut rng), &origin()).unwrap();
        let plan = plan_coverage(&poly, &mz2(), &CoverageParams::default(), &origin()).unwrap();
        for w in plan.lines.windows(2) {
            let da = Vec2::new(
                w[0].end.east - w[0].start.east,
                w[0].end.north - w[0].start.north,
            );
            let db = Vec2::new(
                w[1].end.east - w[1].start.east,
                w[1].end.north - w[1].start.north,
            );
            assert!(da.dot(db) < 0.0);
        }
    }
}

#[test]
fn sorties_concatenate_to_plan_and_export_roundtrips() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let poly = SurveyPolygon::from_enu(&convex(&mut rng), &origin()).unwrap();
    let plan = plan_coverage(&poly, &mz2(), &CoverageParams::default(), &origin()).unwrap();
    let longest = plan.lines.iter().map(|l| l.length()).fold(0.0, f64::max);
    let endurance = 3.0 * longest / plan.params.cruise_speed;
    let sorties = partition_sorties(&plan, endurance).unwrap();
    assert!(sorties.len() > 1);
    let joined: Vec<_> = sorties.iter().flat_map(|s| s.lines.clone()).collect();
    assert_eq!(joined, plan.lines);
    for s in &sorties {
        assert!(s.stats.est_flight_s <= endurance + 1e-9);
    }
    let text = export_waypoints(&plan);
    assert_eq!(WaypointDocument::parse(&text).unwrap().to_geojson(), text);
}

#[test]
fn centreline_section_misses_the_band_on_slanted_edges() {
    // triangle with a 45° hypotenuse; row band v in [40, 60]
    let tri = [
        Vec2::new(0.0, 0.0),
        Vec2::new(200.0, 0.0),
        Vec2::new(0.0, 200.0),
    ];
    let centre = swath_intervals(&tri, 50.0, 50.0);
    let band = swath_intervals(&tri, 40.0, 60.0);
    assert_eq!(centre.len(), 1);
    assert_eq!(band.len(), 1);
    assert!((centre[0].1 - 150.0).abs() < 1e-9);
    assert!((band[0].1 - 160.0).abs() < 1e-9);
}
