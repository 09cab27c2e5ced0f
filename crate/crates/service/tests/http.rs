mod common;

use axum::http::StatusCode;
use common::*;
use serde_json::json;

#[tokio::test]
async fn healthz() {
    let dir = tempfile::tempdir().unwrap();
    let r = get(&app(dir.path()), "/healthz").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json(), json!({"status": "ok"}));
    Schemas::load().check("health", &r.json());
}

#[tokio::test]
async fn mission_crud_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let schemas = Schemas::load();
    for name in ["Erft north", "Blessem", "Swist"] {
        let r = json(&app, "POST", "/missions", &mission_body(name)).await;
        assert_eq!(r.status, StatusCode::CREATED);
        schemas.check("mission", &r.json());
    }
    let list = get(&app, "/missions").await;
    schemas.check("mission_list", &list.json());
    let ids: Vec<_> = list
        .json()
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["id"].clone())
        .collect();
    assert_eq!(ids, [json!("erft-north"), json!("blessem"), json!("swist")]);

    let one = get(&app, "/missions/blessem").await;
    assert_eq!(one.json(), list.json()[1]);

    let dup = json(&app, "POST", "/missions", &mission_body("Blessem")).await;
    assert_eq!(dup.error_code(StatusCode::CONFLICT), "conflict");
    let missing = get(&app, "/missions/nowhere").await;
    assert_eq!(missing.error_code(StatusCode::NOT_FOUND), "not_found");
    schemas.check("error", &missing.json());
    let bad = json(&app, "POST", "/missions", &json!({"name": "x"})).await;
    assert_eq!(
        bad.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_json"
    );
    let bad_origin = json(
        &app,
        "POST",
        "/missions",
        &json!({"name": "y", "origin": {"lat": 95.0, "lon": 0.0}}),
    )
    .await;
    assert_eq!(
        bad_origin.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_coordinates"
    );
    let route = get(&app, "/nope").await;
    assert_eq!(route.error_code(StatusCode::NOT_FOUND), "not_found");
}

#[tokio::test]
async fn plan_is_persisted_once_and_exported() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let schemas = Schemas::load();
    json(&app, "POST", "/missions", &mission_body("m")).await;
    let req = json!({"polygon": square_polygon(), "camera": "mz2", "params": {"side_overlap": 0.7, "heading": 90}});
    schemas.check("plan_request", &req);
    let a = json(&app, "POST", "/missions/m/plan", &req).await;
    assert_eq!(a.status, StatusCode::OK, "{}", a.text());
    schemas.check("plan_response", &a.json());
    let b = json(&app, "POST", "/missions/m/plan", &req).await;
    assert_eq!(a.body, b.body);
    let m = get(&app, "/missions/m").await.json();
    assert_eq!(m["plans"].as_array().unwrap().len(), 1);

    let geo = get(&app, "/missions/m/plan.geojson").await;
    assert_eq!(geo.content_type(), "application/geo+json");
    let doc = geo.json();
    let points = doc["features"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["geometry"]["type"] == "Point")
        .count();
    assert_eq!(
        points,
        a.json()["plan"]["waypoints"].as_array().unwrap().len()
    );
}

#[tokio::test]
async fn plan_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    json(&app, "POST", "/missions", &mission_body("m")).await;
    let line = json!({"type": "Polygon", "coordinates": [[[6.765, 50.806], [6.766, 50.806], [6.767, 50.806], [6.765, 50.806]]]});
    let r = json(&app, "POST", "/missions/m/plan", &json!({"polygon": line})).await;
    assert_eq!(
        r.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_plan"
    );
    let r = json(
        &app,
        "POST",
        "/missions/m/plan",
        &json!({"polygon": {"type": "Point", "coordinates": [6.7, 50.8]}}),
    )
    .await;
    assert_eq!(
        r.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_geojson"
    );
    let r = json(
        &app,
        "POST",
        "/missions/m/plan",
        &json!({"polygon": square_polygon(), "camera": "hasselblad"}),
    )
    .await;
    assert_eq!(
        r.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "unknown_camera"
    );
    let r = json(
        &app,
        "POST",
        "/missions/m/plan",
        &json!({"polygon": square_polygon(), "params": {"side_overlap": 0.99}}),
    )
    .await;
    assert_eq!(
        r.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_plan"
    );
    let r = json(&app, "POST", "/missions/m/plan", &json!({})).await;
    assert_eq!(
        r.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_request"
    );
    let r = get(&app, "/missions/m/plan.geojson").await;
    assert_eq!(r.error_code(StatusCode::NOT_FOUND), "not_found");
}

#[tokio::test]
async fn epochs_products_and_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let schemas = Schemas::load();
    json(&app, "POST", "/missions", &mission_body("m")).await;
    let e1 = upload_epoch(&app, "m", &flat_cloud(10.0), "2021-07-16T12:00:00Z", None).await;
    assert_eq!(e1.status, StatusCode::CREATED, "{}", e1.text());
    schemas.check("epoch_record", &e1.json());
    assert_eq!(e1.json()["epoch_id"], "epoch1");

    let early = upload_epoch(&app, "m", &flat_cloud(10.0), "2021-07-16T11:00:00Z", None).await;
    assert_eq!(early.error_code(StatusCode::CONFLICT), "out_of_order");
    let dup = upload_epoch(
        &app,
        "m",
        &flat_cloud(10.0),
        "2021-07-18T11:00:00Z",
        Some("epoch1"),
    )
    .await;
    assert_eq!(dup.error_code(StatusCode::CONFLICT), "conflict");
    let broken = upload_epoch(&app, "m", "1 2 3\n4 five 6\n", "2021-07-18T11:00:00Z", None).await;
    assert_eq!(
        broken.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_cloud"
    );
    assert!(broken.json()["message"]
        .as_str()
        .unwrap()
        .contains("line 2"));
    let bad_time = upload_epoch(&app, "m", &flat_cloud(10.0), "yesterday", None).await;
    assert_eq!(
        bad_time.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_request"
    );

    let asc = get(&app, "/missions/m/epochs/epoch1/dem.asc").await;
    assert_eq!(asc.status, StatusCode::OK);
    let grid = floodscout_core::dem::read_asc_str(&asc.text()).unwrap();
    assert_eq!((grid.n_cols, grid.n_rows), (80, 80));
    let png = get(&app, "/missions/m/epochs/epoch1/hillshade.png").await;
    assert_eq!(png.content_type(), "image/png");
    assert_eq!(&png.body[1..4], b"PNG");
    let none = get(&app, "/missions/m/epochs/epoch9/dem.asc").await;
    assert_eq!(none.error_code(StatusCode::NOT_FOUND), "not_found");
}

#[tokio::test]
async fn profiles_diff_and_inspection() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let schemas = Schemas::load();
    json(&app, "POST", "/missions", &mission_body("m")).await;
    upload_epoch(&app, "m", &flat_cloud(10.0), "2021-07-16T12:00:00Z", None).await;
    upload_epoch(&app, "m", &flat_cloud(9.5), "2021-07-17T12:00:00Z", None).await;

    // 2 m to 18 m east, 10 m north of the origin
    let line =
        json!({"type": "LineString", "coordinates": [[6.765028, 50.80609], [6.765255, 50.80609]]});
    let req = json!({"line": line, "epochs": ["epoch1", "epoch2"]});
    schemas.check("profile_request", &req);
    let p = json(&app, "POST", "/missions/m/profiles", &req).await;
    assert_eq!(p.status, StatusCode::OK, "{}", p.text());
    schemas.check("profile_response", &p.json());
    let cmp = &p.json()["comparisons"][0];
    assert!((cmp["summary"]["mean"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    assert!(p.json()["csv"][0]
        .as_str()
        .unwrap()
        .starts_with("station_m,lat,lon,elev_m\n"));

    let d = json(
        &app,
        "POST",
        "/missions/m/diff",
        &json!({"epoch_a": "epoch1", "epoch_b": "epoch2"}),
    )
    .await;
    assert_eq!(d.status, StatusCode::OK, "{}", d.text());
    schemas.check("diff_response", &d.json());
    let v = d.json();
    assert!((v["change"]["mean_delta_m"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    assert_eq!(v["zones"].as_array().unwrap().len(), 1);
    let kinds: Vec<_> = v["geojson"]["features"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["properties"]["kind"].clone())
        .collect();
    assert_eq!(kinds, [json!("zone"), json!("buffer")]);
    let bad = json(
        &app,
        "POST",
        "/missions/m/diff",
        &json!({"epoch_a": "epoch1", "epoch_b": "epoch2", "standoff_m": -1}),
    )
    .await;
    assert_eq!(
        bad.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "analytics_error"
    );

    let create =
        json!({"location": {"lat": 50.8061, "lon": 6.7651}, "risk": "high", "note": "dike crest"});
    schemas.check("inspection_create", &create);
    let ip = json(&app, "POST", "/missions/m/inspection-points", &create).await;
    assert_eq!(ip.status, StatusCode::CREATED);
    schemas.check("inspection_point", &ip.json());
    assert_eq!(ip.json()["status"], "open");
    let done = json(
        &app,
        "PUT",
        "/missions/m/inspection-points/ip-001",
        &json!({"status": "inspected"}),
    )
    .await;
    assert_eq!(done.json()["status"], "inspected");
    let back = json(
        &app,
        "PUT",
        "/missions/m/inspection-points/ip-001",
        &json!({"status": "open"}),
    )
    .await;
    assert_eq!(back.error_code(StatusCode::CONFLICT), "illegal_transition");
    let risk = json(
        &app,
        "PUT",
        "/missions/m/inspection-points/ip-001",
        &json!({"risk": "low"}),
    )
    .await;
    assert_eq!(
        risk.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_request"
    );
    let made = json(
        &app,
        "PUT",
        "/missions/m/inspection-points/culvert",
        &json!({"location": {"lat": 50.8062, "lon": 6.7652}, "risk": "low"}),
    )
    .await;
    assert_eq!(made.status, StatusCode::OK);
    assert_eq!(made.json()["id"], "culvert");

    let md = get(&app, "/missions/m/report?a=epoch1&b=epoch2").await;
    assert_eq!(md.status, StatusCode::OK);
    assert!(md.content_type().starts_with("text/markdown"));
    assert!(md.text().contains("mean drop 0.500 m"));
    assert!(md
        .text()
        .contains("- Open: 1, inspected: 1, inaccessible: 0"));
    let js = get(&app, "/missions/m/report.json?a=epoch1&b=epoch2").await;
    schemas.check("report", &js.json());
    let missing = get(&app, "/missions/m/report?a=epoch1&b=epoch7").await;
    assert_eq!(missing.error_code(StatusCode::NOT_FOUND), "not_found");
    let no_query = get(&app, "/missions/m/report").await;
    assert_eq!(
        no_query.error_code(StatusCode::UNPROCESSABLE_ENTITY),
        "invalid_request"
    );
}

#[tokio::test]
async fn gets_never_mutate() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    json(&app, "POST", "/missions", &mission_body("m")).await;
    json(
        &app,
        "POST",
        "/missions/m/plan",
        &json!({"polygon": square_polygon()}),
    )
    .await;
    upload_epoch(&app, "m", &flat_cloud(10.0), "2021-07-16T12:00:00Z", None).await;
    upload_epoch(&app, "m", &flat_cloud(9.7), "2021-07-17T12:00:00Z", None).await;
    let before = snapshot(dir.path());
    let uris = [
        "/missions",
        "/missions/m",
        "/missions/m/plan.geojson",
        "/missions/m/epochs/epoch1/dem.asc",
        "/missions/m/epochs/epoch2/hillshade.png",
        "/missions/m/report?a=epoch1&b=epoch2",
        "/missions/m/report.json?a=epoch1&b=epoch2",
    ];
    let mut first = Vec::new();
    for u in uris {
        first.push(get(&app, u).await.body);
    }
    for (u, body) in uris.iter().zip(&first) {
        assert_eq!(&get(&app, u).await.body, body, "{u}");
    }
    assert_eq!(snapshot(dir.path()), before);
}

#[tokio::test]
async fn missions_are_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    json(&app, "POST", "/missions", &mission_body("alpha")).await;
    json(&app, "POST", "/missions", &mission_body("beta")).await;
    upload_epoch(&app, "beta", &flat_cloud(3.0), "2021-07-16T12:00:00Z", None).await;
    let beta = snapshot(&dir.path().join("beta"));

    json(
        &app,
        "POST",
        "/missions/alpha/plan",
        &json!({"polygon": square_polygon()}),
    )
    .await;
    upload_epoch(
        &app,
        "alpha",
        &flat_cloud(10.0),
        "2021-07-16T12:00:00Z",
        None,
    )
    .await;
    upload_epoch(
        &app,
        "alpha",
        &flat_cloud(9.0),
        "2021-07-17T12:00:00Z",
        None,
    )
    .await;
    json(
        &app,
        "POST",
        "/missions/alpha/inspection-points",
        &json!({"location": {"lat": 50.8061, "lon": 6.7651}, "risk": "low"}),
    )
    .await;
    json(
        &app,
        "PUT",
        "/missions/alpha/inspection-points/ip-001",
        &json!({"status": "inaccessible"}),
    )
    .await;

    assert_eq!(snapshot(&dir.path().join("beta")), beta);
    let b = get(&app, "/missions/beta").await.json();
    assert_eq!(b["epochs"].as_array().unwrap().len(), 1);
    assert!(b["plans"].as_array().unwrap().is_empty());
    assert!(b["inspection_points"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn slow_builds_hit_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let mut st = state(dir.path());
    st.build_budget = std::time::Duration::from_millis(1);
    let app = floodscout::router(st, None);
    json(&app, "POST", "/missions", &mission_body("m")).await;
    let scenario = floodscout_core::synth::blessem_breach(0.4).unwrap();
    let (a, _) = floodscout_core::synth::make_epoch_pair(&scenario.pair).unwrap();
    let text = floodscout_core::dem::write_xyz(&a.points, &scenario.origin);
    let r = upload_epoch(&app, "m", &text, "2021-07-16T12:00:00Z", None).await;
    assert_eq!(
        r.error_code(StatusCode::SERVICE_UNAVAILABLE),
        "build_timeout"
    );
}

#[tokio::test]
async fn console_dir_is_served() {
    let dir = tempfile::tempdir().unwrap();
    let console = tempfile::tempdir().unwrap();
    std::fs::write(console.path().join("index.html"), "<h1>console</h1>").unwrap();
    let app = floodscout::router(state(dir.path()), Some(console.path().to_path_buf()));
    let r = get(&app, "/index.html").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.text(), "<h1>console</h1>");
    assert_eq!(get(&app, "/healthz").await.status, StatusCode::OK);
}
