#![allow(dead_code)]

use axum::body::Body;
use axum::http::{HeaderMap, Request, StatusCode};
use axum::Router;
use chrono::{Duration, TimeZone, Utc};
use floodscout::AppState;
use floodscout_core::store::{ManualClock, Store};
use http_body_util::BodyExt;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use tower::ServiceExt;

pub fn state(dir: &Path) -> AppState {
    let clock = ManualClock::new(
        Utc.with_ymd_and_hms(2021, 7, 16, 8, 0, 0).unwrap(),
        Duration::seconds(1),
    );
    AppState::new(Store::with_clock(dir, Arc::new(clock)).unwrap())
}

pub fn app(dir: &Path) -> Router {
    floodscout::router(state(dir), None)
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }

    pub fn content_type(&self) -> &str {
        self.headers
            .get("content-type")
            .map(|v| v.to_str().unwrap())
            .unwrap_or("")
    }

    /// Asserts an error reply and returns its code.
    pub fn error_code(&self, status: StatusCode) -> String {
        assert_eq!(
            self.status,
            status,
            "{}",
            String::from_utf8_lossy(&self.body)
        );
        let v = self.json();
        assert!(v["message"].is_string());
        v["code"].as_str().unwrap().to_string()
    }
}

pub async fn send(app: &Router, req: Request<Body>) -> Reply {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let headers = res.headers().clone();
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply {
        status,
        headers,
        body,
    }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

pub async fn json(app: &Router, method: &str, uri: &str, body: &Value) -> Reply {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app, req).await
}

const BOUNDARY: &str = "floodscout-test-boundary";

pub async fn upload_epoch(
    app: &Router,
    mission: &str,
    cloud: &str,
    captured_at: &str,
    epoch_id: Option<&str>,
) -> Reply {
    let mut body = String::new();
    let mut field = |name: &str, file: Option<&str>, value: &str| {
        body.push_str(&format!("--{BOUNDARY}\r\n"));
        match file {
            Some(f) => body.push_str(&format!(
                "Content-Disposition: form-data; name=\"{name}\"; filename=\"{f}\"\r\nContent-Type: text/plain\r\n\r\n"
            )),
            None => body.push_str(&format!("Content-Disposition: form-data; name=\"{name}\"\r\n\r\n")),
        }
        body.push_str(value);
        body.push_str("\r\n");
    };
    field("cloud", Some("cloud.xyz"), cloud);
    field("captured_at", None, captured_at);
    if let Some(id) = epoch_id {
        field("epoch_id", None, id);
    }
    body.push_str(&format!("--{BOUNDARY}--\r\n"));
    let req = Request::post(format!("/missions/{mission}/epochs"))
        .header(
            "content-type",
            format!("multipart/form-data; boundary={BOUNDARY}"),
        )
        .body(Body::from(body))
        .unwrap();
    send(app, req).await
}

/// Validators for the checked-in schemas.
pub struct Schemas(BTreeMap<String, jsonschema::Validator>);

impl Schemas {
    pub fn load() -> Self {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas");
        let mut map = BTreeMap::new();
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            let name = path
                .file_name()
                .unwrap()
                .to_str()
                .unwrap()
                .trim_end_matches(".schema.json")
                .to_string();
            let schema: Value =
                serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
            map.insert(name, jsonschema::validator_for(&schema).unwrap());
        }
        Schemas(map)
    }

    pub fn check(&self, name: &str, v: &Value) {
        let validator = self
            .0
            .get(name)
            .unwrap_or_else(|| panic!("no schema `{name}`"));
        let errors: Vec<String> = validator
            .iter_errors(v)
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        assert!(errors.is_empty(), "{name}: {errors:#?}");
    }
}

/// Flat 20 m square in the mission frame, 0.2 m point spacing.
pub fn flat_cloud(z: f64) -> String {
    let mut s = String::new();
    for i in 0..100 {
        for j in 0..100 {
            s.push_str(&format!(
                "{:.2} {:.2} {z:.3}\n",
                i as f64 * 0.2 + 0.1,
                j as f64 * 0.2 + 0.1
            ));
        }
    }
    s
}

pub fn mission_body(name: &str) -> Value {
    serde_json::json!({"name": name, "origin": {"lat": 50.806, "lon": 6.765, "alt": 0.0}})
}

pub fn square_polygon() -> Value {
    serde_json::json!({
        "type": "Polygon",
        "coordinates": [[[6.765, 50.806], [6.767, 50.806], [6.767, 50.807], [6.765, 50.807], [6.765, 50.806]]]
    })
}

/// Every file under `dir` with its contents, for before/after comparisons.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    std::fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}
