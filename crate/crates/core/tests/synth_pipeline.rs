use floodscout_core::analytics::{compare_profiles, diff_dem, extract_profile_enu};
use floodscout_core::dem::{build_dem, rasterize, Aggregation, DemBuildParams};
use floodscout_core::geodesy::EnuPoint;
use floodscout_core::synth::{
    blessem_breach, make_epoch_pair, sample_terrain, TerrainKind, TerrainSpec,
};

#[test]
fn rasterized_plane_stays_within_half_a_cell_of_gradient() {
    let (gx, gy) = (0.3, -0.12);
    let spec = TerrainSpec {
        terrain: TerrainKind::Plane { gx, gy, z0: 12.0 },
        extent: [40.0, 30.0],
        seed: 9,
    };
    let cloud = sample_terrain(&spec, 20.0, 0.0).unwrap();
    for cell in [0.25, 0.5, 1.0] {
        let g = rasterize(&cloud, cell, Aggregation::Mean).unwrap();
        // mean of points lies at their centroid, which is inside the cell
        let bound = 0.5 * cell * (gx.abs() + gy.abs()) + 1e-9;
        for r in 0..g.n_rows {
            for c in 0..g.n_cols {
                if let Some(z) = g.get(c, r) {
                    let (e, n) = g.cell_center(c, r);
                    assert!(
                        (z - spec.elevation(e, n)).abs() <= bound,
                        "cell {cell} at ({c}, {r})"
                    );
                }
            }
        }
    }
}

#[test]
fn same_seed_gives_identical_epochs() {
    let s = blessem_breach(0.0).unwrap();
    let (a, b) = make_epoch_pair(&s.pair).unwrap();
    assert_eq!(a, b);
}

#[test]
fn small_breach_recovers_the_drop() {
    let mut s = blessem_breach(0.4).unwrap();
    s.pair.point_density = 4.0;
    let (a, b) = make_epoch_pair(&s.pair).unwrap();
    let params = DemBuildParams {
        cell_size: 0.5,
        ..Default::default()
    };
    let (ga, _) = build_dem(&a, &params).unwrap();
    let (gb, _) = build_dem(&b, &params).unwrap();
    let (_, report) = diff_dem(&ga, &gb, 0.2).unwrap();
    assert!((report.mean_drop_m() - 0.4).abs() < 0.02, "{report:?}");
    let line = [
        EnuPoint::new(10.0, 10.0, 0.0),
        EnuPoint::new(140.0, 140.0, 0.0),
    ];
    let pa = extract_profile_enu(&ga, &line, None, &s.origin).unwrap();
    let pb = extract_profile_enu(&gb, &line, None, &s.origin).unwrap();
    let cmp = compare_profiles(&pa, &pb).unwrap();
    assert!(cmp.deltas.iter().flatten().all(|d| (d + 0.4).abs() < 0.03));
}
