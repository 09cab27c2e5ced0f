use floodscout_core::analytics::{
    compare_profiles, detect_hazard_zones, diff_dem, extract_profile_enu, standoff_buffer,
    HazardZone,
};
use floodscout_core::dem::{DemGrid, DEFAULT_NODATA};
use floodscout_core::geodesy::{EnuPoint, GeoPoint, MissionOrigin};
use floodscout_core::geometry::{distance_to_boundary, point_in_polygon, Vec2};
use proptest::prelude::*;

fn origin() -> MissionOrigin {
    MissionOrigin::new(GeoPoint::new(50.806, 6.765, 0.0).unwrap()).unwrap()
}

/// Random grid with some nodata holes.
fn grid_strategy() -> impl Strategy<Value = DemGrid> {
    (
        2usize..12,
        2usize..12,
        0.1..3.0f64,
        -50.0..50.0f64,
        -50.0..50.0f64,
    )
        .prop_flat_map(|(nc, nr, c, x0, y0)| {
            prop::collection::vec(
                prop_oneof![9 => -20.0..120.0f64, 1 => Just(DEFAULT_NODATA)],
                nc * nr,
            )
            .prop_map(move |values| {
                DemGrid::new(x0, y0, c, nc, nr, values, DEFAULT_NODATA).unwrap()
            })
        })
}

fn pair_strategy() -> impl Strategy<Value = (DemGrid, DemGrid)> {
    grid_strategy().prop_flat_map(|a| {
        let n = a.values.len();
        let a2 = a.clone();
        prop::collection::vec(
            prop_oneof![9 => -20.0..120.0f64, 1 => Just(DEFAULT_NODATA)],
            n,
        )
        .prop_map(move |v| {
            let mut b = a2.clone();
            b.values = v;
            (a2.clone(), b)
        })
    })
}

fn any_valid(a: &DemGrid, b: &DemGrid) -> bool {
    a.values
        .iter()
        .zip(&b.values)
        .any(|(x, y)| *x != DEFAULT_NODATA && *y != DEFAULT_NODATA)
}

proptest! {
    #[test]
    fn diff_is_antisymmetric((a, b) in pair_strategy()) {
        prop_assume!(any_valid(&a, &b));
        let (ab, rab) = diff_dem(&a, &b, 0.2).unwrap();
        let (ba, rba) = diff_dem(&b, &a, 0.2).unwrap();
        for (x, y) in ab.values.iter().zip(&ba.values) {
            if *x == DEFAULT_NODATA {
                prop_assert_eq!(*y, DEFAULT_NODATA);
            } else {
                prop_assert_eq!(*x, -*y);
            }
        }
        prop_assert!((rab.mean_delta_m + rba.mean_delta_m).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&rab.valid_cell_fraction));
        prop_assert!(rab.max_drop_m >= 0.0);
    }

    #[test]
    fn self_diff_is_zero(a in grid_strategy()) {
        prop_assume!(a.valid_count() > 0);
        let (d, r) = diff_dem(&a, &a, 0.2).unwrap();
        prop_assert!(d.values.iter().all(|&v| v == 0.0 || v == DEFAULT_NODATA));
        prop_assert_eq!(r.mean_delta_m, 0.0);
        prop_assert_eq!(r.area_exceeding_m2, 0.0);
    }

    #[test]
    fn adding_a_constant_to_both_changes_nothing((a, b) in pair_strategy(), k in -30.0..30.0f64) {
        prop_assume!(any_valid(&a, &b));
        let shift = |g: &DemGrid| {
            let mut s = g.clone();
            for v in s.values.iter_mut().filter(|v| **v != DEFAULT_NODATA) {
                *v += k;
            }
            s
        };
        let (d0, _) = diff_dem(&a, &b, 0.2).unwrap();
        let (d1, _) = diff_dem(&shift(&a), &shift(&b), 0.2).unwrap();
        for (x, y) in d0.values.iter().zip(&d1.values) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn profile_and_raster_agree_on_uniform_offset(a in grid_strategy(), off in -2.0..2.0f64,
                                                  t0 in 0.0..1.0f64, t1 in 0.0..1.0f64,
                                                  s0 in 0.0..1.0f64, s1 in 0.0..1.0f64) {
        // fully valid grids so every station samples valid data
        let mut a = a;
        for (i, v) in a.values.iter_mut().enumerate() {
            if *v == DEFAULT_NODATA {
                *v = i as f64 * 0.37;
            }
        }
        let mut b = a.clone();
        for v in b.values.iter_mut() {
            *v += off;
        }
        let (_, report) = diff_dem(&a, &b, 0.2).unwrap();
        let w = a.max_east() - a.origin_east;
        let h = a.max_north() - a.origin_north;
        let p0 = EnuPoint::new(a.origin_east + t0 * w, a.origin_north + s0 * h, 0.0);
        let p1 = EnuPoint::new(a.origin_east + t1 * w, a.origin_north + s1 * h, 0.0);
        prop_assume!((p1.east - p0.east).hypot(p1.north - p0.north) > 1e-3);
        let pa = extract_profile_enu(&a, &[p0, p1], None, &origin()).unwrap();
        let pb = extract_profile_enu(&b, &[p0, p1], None, &origin()).unwrap();
        let cmp = compare_profiles(&pa, &pb).unwrap();
        let s = cmp.summary.unwrap();
        prop_assert!((s.mean - report.mean_delta_m).abs() < 1e-6);
        let mean: f64 = cmp.deltas.iter().flatten().sum::<f64>() / s.valid_pairs as f64;
        prop_assert_eq!(s.mean, mean);
    }

    #[test]
    fn zones_and_buffers_contain_their_cells(nc in 3usize..14, nr in 3usize..14,
                                             mask in prop::collection::vec(any::<bool>(), 196),
                                             standoff in 1.0..200.0f64) {
        let d = DemGrid::from_fn(10.0, -5.0, 0.5, nc, nr, |e, n| {
            let c = ((e - 10.0) / 0.5) as usize;
            let r = ((n + 5.0) / 0.5) as usize;
            if mask[r * 14 + c] { -0.5 } else { 0.0 }
        }).unwrap();
        let zones = detect_hazard_zones(&d, 0.2, 1).unwrap();
        let adv = standoff_buffer(&zones, standoff).unwrap();
        let hot = mask.iter().enumerate().filter(|(i, m)| **m && i % 14 < nc && i / 14 < nr).count();
        prop_assert_eq!(zones.iter().map(|z| z.cell_count).sum::<usize>(), hot);
        let bound = standoff * (std::f64::consts::PI / 16.0).cos();
        for (z, b) in zones.iter().zip(&adv.buffer_polygons) {
            let br: Vec<Vec2> = b.iter().map(|p| Vec2::new(p.east, p.north)).collect();
            let zr: Vec<Vec2> = z.polygon.iter().map(|p| Vec2::new(p.east, p.north)).collect();
            for v in &zr {
                prop_assert!(point_in_polygon(*v, &br));
                prop_assert!(distance_to_boundary(*v, &br) >= bound - 1e-9);
            }
            // every hot cell centre inside the zone hull (or on it) and the buffer
            for r in 0..nr {
                for c in 0..nc {
                    if !mask[r * 14 + c] { continue; }
                    let (e, n) = d.cell_center(c, r);
                    let p = Vec2::new(e, n);
                    if zr.len() >= 3 && zone_owns(z, &d, c, r) {
                        prop_assert!(point_in_polygon(p, &zr));
                        prop_assert!(point_in_polygon(p, &br));
                    }
                }
            }
        }
    }
}

/// Whether cell (c, r) belongs to zone `z`, checked by flood fill.
fn zone_owns(z: &HazardZone, d: &DemGrid, c: usize, r: usize) -> bool {
    let (nc, nr) = (d.n_cols, d.n_rows);
    let hot = |i: usize| d.values[i] <= -0.2;
    let mut seen = vec![false; nc * nr];
    let mut stack = vec![r * nc + c];
    seen[r * nc + c] = true;
    let mut centres = Vec::new();
    while let Some(i) = stack.pop() {
        let (e, n) = d.cell_center(i % nc, i / nc);
        centres.push((e, n));
        let (cc, rr) = (i % nc, i / nc);
        let mut nb = Vec::new();
        if cc > 0 {
            nb.push(i - 1);
        }
        if cc + 1 < nc {
            nb.push(i + 1);
        }
        if rr > 0 {
            nb.push(i - nc);
        }
        if rr + 1 < nr {
            nb.push(i + nc);
        }
        for j in nb {
            if hot(j) && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    z.cell_count == centres.len()
        && z.polygon
            .iter()
            .all(|v| centres.iter().any(|&(e, n)| e == v.east && n == v.north))
}

#[test]
fn two_separated_blobs() {
    // oracle: two 10-cell blobs, hand placed
    let mut values = vec![0.0; 15 * 10];
    for r in 1..3 {
        for c in 1..6 {
            values[r * 15 + c] = -0.6;
        }
    }
    for r in 5..7 {
        for c in 8..13 {
            values[r * 15 + c] = -0.3;
        }
    }
    let d = DemGrid::new(0.0, 0.0, 1.0, 15, 10, values, DEFAULT_NODATA).unwrap();
    let z = detect_hazard_zones(&d, 0.2, 4).unwrap();
    assert_eq!(z.len(), 2);
    assert_eq!((z[0].cell_count, z[1].cell_count), (10, 10));
    assert!((z[0].peak_drop_m - 0.6).abs() < 1e-12);
    assert!((z[1].peak_drop_m - 0.3).abs() < 1e-12);
}
