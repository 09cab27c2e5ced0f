use floodscout_core::geodesy::{
    geodesic_distance, EnuPoint, GeoPoint, GeodesyError, MissionOrigin, RangePolicy,
};
use proptest::prelude::*;

fn origin(lat: f64, lon: f64) -> MissionOrigin {
    MissionOrigin::new(GeoPoint::new(lat, lon, 80.0).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn enu_roundtrip_below_a_millimetre(lat0 in -70.0..70.0f64, lon0 in -179.0..179.0f64,
                                        r in 0.0..5000.0f64, a in 0.0..std::f64::consts::TAU,
                                        up in -200.0..500.0f64) {
        let o = origin(lat0, lon0);
        let e = EnuPoint::new(r * a.cos(), r * a.sin(), up);
        let g = o.enu_to_wgs84(&e).unwrap();
        let back = o.wgs84_to_enu(&g).unwrap();
        let err = ((back.east - e.east).powi(2) + (back.north - e.north).powi(2) + (back.up - e.up).powi(2)).sqrt();
        prop_assert!(err < 1e-3, "error {err} m");
    }

    #[test]
    fn short_range_distance_agrees_with_plane(r in 1.0..2000.0f64, a in 0.0..std::f64::consts::TAU) {
        let o = origin(50.806, 6.765);
        let g = o.enu_to_wgs84(&EnuPoint::new(r * a.cos(), r * a.sin(), 0.0)).unwrap();
        let d = geodesic_distance(&o.anchor, &g);
        prop_assert!((d - r).abs() / r < 1e-3);
    }
}

#[test]
fn one_degree_of_latitude() {
    let a = GeoPoint::new(50.0, 6.0, 0.0).unwrap();
    let b = GeoPoint::new(51.0, 6.0, 0.0).unwrap();
    assert!((geodesic_distance(&a, &b) - 111_195.0).abs() < 1.0);
}

#[test]
fn dateline_neighbours_are_close() {
    let o = origin(0.0, 179.9999);
    let g = GeoPoint::new(0.0, -179.9999, 80.0).unwrap();
    let e = o.wgs84_to_enu(&g).unwrap();
    assert!((e.east - 22.239).abs() < 1e-2, "{e:?}");
}

#[test]
fn far_points_need_the_warn_policy() {
    let o = origin(50.806, 6.765);
    let far = GeoPoint::new(51.806, 6.765, 0.0).unwrap();
    assert!(matches!(
        o.wgs84_to_enu(&far),
        Err(GeodesyError::OutOfRange { .. })
    ));
    let p = o.wgs84_to_enu_with(&far, RangePolicy::Warn).unwrap();
    assert!(p.beyond_validity);
    assert!(GeoPoint::new(91.0, 0.0, 0.0).is_err());
    assert!(GeoPoint::new(0.0, f64::NAN, 0.0).is_err());
}
