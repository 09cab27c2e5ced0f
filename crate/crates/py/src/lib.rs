//! Python bindings. Small value types are classes; structured results cross
//! the boundary as JSON strings, the same documents the HTTP API serves.

use floodscout_core::analytics::{
    compare_profiles, detect_hazard_zones, diff_dem, estimate_recession_rate, extract_profile,
    hazard_geojson, recommend_revisit, standoff_buffer, ProfileLine,
};
use floodscout_core::coverage::{
    export_waypoints, plan_coverage, verify_coverage, CoverageParams, SurveyPolygon,
};
use floodscout_core::dem::{
    build_dem, parse_xyz, read_asc_str, write_asc_string, write_xyz, DemBuildParams, DemGrid,
};
use floodscout_core::geodesy::{self, EnuPoint, MissionOrigin};
use floodscout_core::sensor::{CameraCatalog, CameraSpec};
use floodscout_core::store::{self, Store as CoreStore};
use floodscout_core::synth;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(floodscout, FloodscoutError, PyException);

fn fail(e: impl std::fmt::Display) -> PyErr {
    FloodscoutError::new_err(e.to_string())
}

fn from_json<T: DeserializeOwned>(what: &str, text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("{what}: {e}")))
}

fn to_json<T: Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(fail)
}

#[pyclass(frozen, eq, from_py_object, module = "floodscout")]
#[derive(Clone, Copy, PartialEq)]
struct GeoPoint {
    inner: geodesy::GeoPoint,
}

#[pymethods]
impl GeoPoint {
    #[new]
    #[pyo3(signature = (lat, lon, alt = 0.0))]
    fn new(lat: f64, lon: f64, alt: f64) -> PyResult<Self> {
        Ok(GeoPoint {
            inner: geodesy::GeoPoint::new(lat, lon, alt)
                .map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    #[getter]
    fn lat(&self) -> f64 {
        self.inner.lat
    }

    #[getter]
    fn lon(&self) -> f64 {
        self.inner.lon
    }

    #[getter]
    fn alt(&self) -> f64 {
        self.inner.alt
    }

    /// Great-circle distance in metres.
    fn distance_to(&self, other: &GeoPoint) -> f64 {
        geodesy::geodesic_distance(&self.inner, &other.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "GeoPoint(lat={}, lon={}, alt={})",
            self.inner.lat, self.inner.lon, self.inner.alt
        )
    }
}

/// Local east/north/up frame anchored at a mission origin.
#[pyclass(frozen, skip_from_py_object, module = "floodscout")]
#[derive(Clone, Copy)]
struct Origin {
    inner: MissionOrigin,
}

#[pymethods]
#[allow(clippy::wrong_self_convention)]
impl Origin {
    #[new]
    fn new(anchor: &GeoPoint) -> PyResult<Self> {
        Ok(Origin {
            inner: MissionOrigin::new(anchor.inner).map_err(fail)?,
        })
    }

    #[getter]
    fn anchor(&self) -> GeoPoint {
        GeoPoint {
            inner: self.inner.anchor,
        }
    }

    /// `(east, north, up)` in metres.
    fn to_enu(&self, p: &GeoPoint) -> PyResult<(f64, f64, f64)> {
        let e = self.inner.wgs84_to_enu(&p.inner).map_err(fail)?;
        Ok((e.east, e.north, e.up))
    }

    #[pyo3(signature = (east, north, up = 0.0))]
    fn to_wgs84(&self, east: f64, north: f64, up: f64) -> PyResult<GeoPoint> {
        let g = self
            .inner
            .enu_to_wgs84(&EnuPoint::new(east, north, up))
            .map_err(fail)?;
        Ok(GeoPoint { inner: g })
    }
}

#[pyclass(frozen, skip_from_py_object, module = "floodscout")]
#[derive(Clone)]
struct Camera {
    inner: CameraSpec,
}

#[pymethods]
impl Camera {
    #[new]
    #[pyo3(signature = (name, res_x, res_y, hfov_deg, assumed = false))]
    fn new(name: String, res_x: u32, res_y: u32, hfov_deg: f64, assumed: bool) -> PyResult<Self> {
        let inner = CameraSpec::new(name, res_x, res_y, hfov_deg, assumed)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Camera { inner })
    }

    /// Looks a camera up in the built-in catalog.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let inner = CameraCatalog::builtin().get(name).map_err(fail)?.clone();
        Ok(Camera { inner })
    }

    #[staticmethod]
    fn builtin_names() -> Vec<String> {
        CameraCatalog::builtin()
            .cameras()
            .iter()
            .map(|c| c.name.clone())
            .collect()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn vfov_deg(&self) -> f64 {
        self.inner.vfov_deg()
    }

    /// `(width, height)` of the ground footprint in metres.
    fn footprint(&self, altitude_agl: f64) -> PyResult<(f64, f64)> {
        let f = self.inner.footprint(altitude_agl).map_err(fail)?;
        Ok((f.width, f.height))
    }

    fn gsd(&self, altitude_agl: f64) -> PyResult<f64> {
        self.inner.gsd(altitude_agl).map_err(fail)
    }
}

/// An elevation grid in the mission frame.
#[pyclass(from_py_object, module = "floodscout")]
#[derive(Clone)]
struct Dem {
    inner: DemGrid,
}

#[pymethods]
impl Dem {
    #[staticmethod]
    fn from_asc(text: &str) -> PyResult<Self> {
        Ok(Dem {
            inner: read_asc_str(text).map_err(fail)?,
        })
    }

    fn to_asc(&self) -> String {
        write_asc_string(&self.inner)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.n_rows, self.inner.n_cols)
    }

    #[getter]
    fn cell_size(&self) -> f64 {
        self.inner.cell_size
    }

    #[getter]
    fn valid_fraction(&self) -> f64 {
        self.inner.valid_fraction()
    }

    /// Value of the cell at `(col, row)`, counted from the lower-left corner.
    fn get(&self, col: usize, row: usize) -> Option<f64> {
        self.inner.get(col, row)
    }

    fn stats_json(&self) -> PyResult<String> {
        to_json(&self.inner.stats())
    }
}

/// Builds a DEM from `.xyz` text. Returns the grid and the build statistics as JSON.
#[pyfunction]
#[pyo3(signature = (xyz_text, origin, params_json = None))]
fn build_dem_from_xyz(
    xyz_text: &str,
    origin: &Origin,
    params_json: Option<&str>,
) -> PyResult<(Dem, String)> {
    let params: DemBuildParams = match params_json {
        Some(t) => from_json("params", t)?,
        None => DemBuildParams::default(),
    };
    let cloud = parse_xyz(xyz_text)
        .and_then(|c| c.into_enu(&origin.inner))
        .map_err(fail)?;
    let (grid, stats) = build_dem(&cloud, &params).map_err(fail)?;
    Ok((Dem { inner: grid }, to_json(&stats)?))
}

fn polygon(points: Vec<GeoPoint>) -> PyResult<SurveyPolygon> {
    SurveyPolygon::new(points.into_iter().map(|p| p.inner).collect()).map_err(fail)
}

/// Plans a photo flight. Returns the plan as JSON.
#[pyfunction]
#[pyo3(signature = (polygon_points, camera, origin, params_json = None))]
fn plan(
    polygon_points: Vec<GeoPoint>,
    camera: &Camera,
    origin: &Origin,
    params_json: Option<&str>,
) -> PyResult<String> {
    let params: CoverageParams = match params_json {
        Some(t) => from_json("params", t)?,
        None => CoverageParams::default(),
    };
    let poly = polygon(polygon_points)?;
    let p = plan_coverage(&poly, &camera.inner, &params, &origin.inner).map_err(fail)?;
    to_json(&p)
}

/// Fraction of the polygon imaged by the plan's photos.
#[pyfunction]
#[pyo3(signature = (plan_json, polygon_points, camera, params_json = None))]
fn coverage_fraction(
    plan_json: &str,
    polygon_points: Vec<GeoPoint>,
    camera: &Camera,
    params_json: Option<&str>,
) -> PyResult<f64> {
    let params: CoverageParams = match params_json {
        Some(t) => from_json("params", t)?,
        None => CoverageParams::default(),
    };
    let p = from_json("plan", plan_json)?;
    verify_coverage(&p, &polygon(polygon_points)?, &camera.inner, &params).map_err(fail)
}

#[pyfunction]
fn waypoints_geojson(plan_json: &str) -> PyResult<String> {
    Ok(export_waypoints(&from_json("plan", plan_json)?))
}

/// Differences two grids (`b - a`). Returns the change report, hazard zones,
/// standoff advisory and hazard GeoJSON in one JSON document.
#[pyfunction]
#[pyo3(signature = (a, b, origin, threshold_m = 0.2, standoff_m = 100.0, min_cells = 4))]
fn diff(
    a: &Dem,
    b: &Dem,
    origin: &Origin,
    threshold_m: f64,
    standoff_m: f64,
    min_cells: usize,
) -> PyResult<String> {
    let (delta, change) = diff_dem(&a.inner, &b.inner, threshold_m).map_err(fail)?;
    let zones = detect_hazard_zones(&delta, threshold_m, min_cells).map_err(fail)?;
    let advisory = standoff_buffer(&zones, standoff_m).map_err(fail)?;
    let geojson = hazard_geojson(&zones, &advisory, &origin.inner).map_err(fail)?;
    to_json(&serde_json::json!({
        "change": change,
        "zones": zones,
        "advisory": advisory,
        "geojson": geojson,
    }))
}

/// Samples each grid along a polyline and compares them pairwise in order.
#[pyfunction]
#[pyo3(signature = (dems, line, origin, step_m = None, label = "profile"))]
fn profiles(
    dems: Vec<Dem>,
    line: Vec<GeoPoint>,
    origin: &Origin,
    step_m: Option<f64>,
    label: &str,
) -> PyResult<String> {
    let line = ProfileLine::new(line.into_iter().map(|p| p.inner).collect(), label);
    let ps = dems
        .iter()
        .map(|d| extract_profile(&d.inner, &line, step_m, &origin.inner))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail)?;
    let cmp = ps
        .windows(2)
        .map(|w| compare_profiles(&w[0], &w[1]))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail)?;
    to_json(&serde_json::json!({ "profiles": ps, "comparisons": cmp }))
}

/// Revisit interval in hours for the change in `change_json` observed over `elapsed_h`.
#[pyfunction]
#[pyo3(signature = (change_json, elapsed_h, safety_budget_m = 0.05))]
fn revisit_hours(change_json: &str, elapsed_h: f64, safety_budget_m: f64) -> PyResult<f64> {
    let change = from_json("change", change_json)?;
    let rate = estimate_recession_rate(&change, elapsed_h).map_err(fail)?;
    recommend_revisit(rate.rate_m_per_h, safety_budget_m).map_err(fail)
}

/// Generates a preset's epoch pair. Returns `(xyz_a, xyz_b, ground_truth_json)`.
#[pyfunction]
#[pyo3(signature = (preset = "blessem-breach", drop_m = 0.4))]
fn synth_scenario(preset: &str, drop_m: f64) -> PyResult<(String, String, String)> {
    let s = synth::preset(preset, drop_m).map_err(fail)?;
    let (a, b) = synth::make_epoch_pair(&s.pair).map_err(fail)?;
    Ok((
        write_xyz(&a.points, &s.origin),
        write_xyz(&b.points, &s.origin),
        to_json(&s.ground_truth())?,
    ))
}

/// Mission directory store.
#[pyclass(frozen, module = "floodscout")]
struct Store {
    inner: CoreStore,
}

#[pymethods]
impl Store {
    #[new]
    fn open(root: std::path::PathBuf) -> PyResult<Self> {
        Ok(Store {
            inner: CoreStore::open(root).map_err(fail)?,
        })
    }

    #[pyo3(signature = (name, origin, polygon_points = None))]
    fn create_mission(
        &self,
        name: String,
        origin: &GeoPoint,
        polygon_points: Option<Vec<GeoPoint>>,
    ) -> PyResult<String> {
        let survey_polygon = polygon_points.map(polygon).transpose()?;
        let m = self
            .inner
            .create_mission(store::NewMission {
                name,
                origin: origin.inner,
                survey_polygon,
            })
            .map_err(fail)?;
        to_json(&m)
    }

    fn get_mission(&self, mission_id: &str) -> PyResult<String> {
        to_json(&self.inner.get_mission(mission_id).map_err(fail)?)
    }

    fn list_missions(&self) -> PyResult<String> {
        to_json(&self.inner.list_missions().map_err(fail)?)
    }

    /// `captured_at` is RFC 3339.
    #[pyo3(signature = (mission_id, xyz_text, captured_at, epoch_id = None, params_json = None))]
    fn register_epoch(
        &self,
        mission_id: &str,
        xyz_text: &str,
        captured_at: &str,
        epoch_id: Option<&str>,
        params_json: Option<&str>,
    ) -> PyResult<String> {
        let at = from_json(
            "captured_at",
            &serde_json::Value::String(captured_at.into()).to_string(),
        )?;
        let params: DemBuildParams = match params_json {
            Some(t) => from_json("params", t)?,
            None => DemBuildParams::default(),
        };
        let rec = self
            .inner
            .register_epoch(mission_id, xyz_text, at, epoch_id, &params)
            .map_err(fail)?;
        to_json(&rec)
    }

    fn load_dem(&self, mission_id: &str, epoch_id: &str) -> PyResult<Dem> {
        Ok(Dem {
            inner: self.inner.load_dem(mission_id, epoch_id).map_err(fail)?,
        })
    }

    /// Returns `(markdown, json)`.
    #[pyo3(signature = (mission_id, epoch_a, epoch_b, options_json = None))]
    fn report(
        &self,
        mission_id: &str,
        epoch_a: &str,
        epoch_b: &str,
        options_json: Option<&str>,
    ) -> PyResult<(String, String)> {
        let opts: store::ReportOptions = match options_json {
            Some(t) => from_json("options", t)?,
            None => store::ReportOptions::default(),
        };
        let r = self
            .inner
            .generate_report(mission_id, epoch_a, epoch_b, &opts)
            .map_err(fail)?;
        Ok((r.markdown.clone(), r.json()))
    }
}

#[pymodule]
fn floodscout(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FloodscoutError", m.py().get_type::<FloodscoutError>())?;
    m.add_class::<GeoPoint>()?;
    m.add_class::<Origin>()?;
    m.add_class::<Camera>()?;
    m.add_class::<Dem>()?;
    m.add_class::<Store>()?;
    m.add_function(wrap_pyfunction!(build_dem_from_xyz, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(waypoints_geojson, m)?)?;
    m.add_function(wrap_pyfunction!(diff, m)?)?;
    m.add_function(wrap_pyfunction!(profiles, m)?)?;
    m.add_function(wrap_pyfunction!(revisit_hours, m)?)?;
    m.add_function(wrap_pyfunction!(synth_scenario, m)?)?;
    Ok(())
}
