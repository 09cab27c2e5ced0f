//! `floodscout` command line.

use crate::api::{self, AppState};
use crate::types::{DiffRequest, PlanRequest, ProfileRequest};
use crate::{ops, schema};
use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};
use floodscout_core::analytics::{
    compare_profiles, detect_hazard_zones, diff_dem, extract_profile, hazard_geojson, profile_csv,
    standoff_buffer, ProfileLine,
};
use floodscout_core::coverage::{plan_coverage, CoverageParams, Heading, SurveyPolygon};
use floodscout_core::dem::{
    build_dem, read_asc, read_xyz, render_hillshade, write_asc_with, Aggregation, DemBuildParams,
    DemGrid,
};
use floodscout_core::geodesy::{GeoPoint, MissionOrigin};
use floodscout_core::geojson::{parse_line_string, parse_polygon};
use floodscout_core::sensor::CameraCatalog;
use floodscout_core::store::{InspectionStatus, InspectionUpsert, NewMission, Risk, Store};
use floodscout_core::synth::{make_epoch_pair, preset, write_scenario_files, PRESETS};
use serde::Serialize;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "floodscout",
    version,
    about = "UAV flood survey planning and terrain-change analytics"
)]
pub struct Cli {
    /// Mission store directory.
    #[arg(
        long,
        global = true,
        env = "FLOODSCOUT_DATA_DIR",
        default_value = "floodscout-data"
    )]
    pub data_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP API.
    Serve(ServeArgs),
    /// Plan a meander survey over a polygon.
    Plan(PlanArgs),
    /// Build DEMs and hillshades from files.
    #[command(subcommand)]
    Dem(DemCommand),
    /// Elevation profiles along a line, compared across epochs.
    Profile(ProfileArgs),
    /// Difference two DEMs and derive hazard zones.
    Diff(DiffArgs),
    /// Render the mission report (markdown plus JSON sidecar).
    Report(ReportArgs),
    /// Generate a synthetic epoch pair with ground truth.
    Synth(SynthArgs),
    /// Create, list and show missions.
    #[command(subcommand)]
    Mission(MissionCommand),
    /// Register survey epochs.
    #[command(subcommand)]
    Epoch(EpochCommand),
    /// Track inspection points.
    #[command(subcommand)]
    Inspect(InspectCommand),
    /// Write the API JSON schemas.
    Schemas {
        #[arg(long, default_value = "schemas")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Static files served for unknown paths (the ops console build).
    #[arg(long)]
    pub console_dir: Option<PathBuf>,
}

fn parse_geo(s: &str) -> Result<GeoPoint, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    let (lat, lon, alt) = match v[..] {
        [lat, lon] => (lat, lon, 0.0),
        [lat, lon, alt] => (lat, lon, alt),
        _ => return Err("expected lat,lon or lat,lon,alt".into()),
    };
    GeoPoint::new(lat, lon, alt).map_err(|e| e.to_string())
}

fn parse_time(s: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// GeoJSON polygon file.
    #[arg(long)]
    pub polygon: PathBuf,
    /// Persist the plan in this mission and use its origin.
    #[arg(long)]
    pub mission: Option<String>,
    /// ENU origin `lat,lon[,alt]`; defaults to the first polygon vertex.
    #[arg(long, value_parser = parse_geo)]
    pub origin: Option<GeoPoint>,
    #[arg(long, default_value = "mz2")]
    pub camera: String,
    /// TOML camera catalog replacing the built-in one.
    #[arg(long)]
    pub camera_catalog: Option<PathBuf>,
    #[arg(long, default_value_t = 50.0)]
    pub altitude: f64,
    #[arg(long, default_value_t = 0.65)]
    pub side_overlap: f64,
    #[arg(long, default_value_t = 0.75)]
    pub front_overlap: f64,
    /// Degrees clockwise from north, or `auto`.
    #[arg(long, default_value = "auto")]
    pub heading: Heading,
    #[arg(long, default_value_t = 5.0)]
    pub speed: f64,
    /// Waypoint GeoJSON output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Full plan as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DemCommand {
    /// Rasterize a point cloud, fill voids, and write an ASCII grid.
    Build(DemBuildArgs),
    /// Render a hillshade PNG from an ASCII grid.
    Shade(DemShadeArgs),
}

#[derive(Debug, Args)]
pub struct DemBuildArgs {
    #[arg(long)]
    pub cloud: PathBuf,
    /// Frame of the output grid, `lat,lon[,alt]`. Defaults to the cloud's own anchor.
    #[arg(long, value_parser = parse_geo)]
    pub origin: Option<GeoPoint>,
    #[arg(long, default_value_t = 0.25)]
    pub cell_size: f64,
    #[arg(long, default_value = "mean")]
    pub aggregation: Aggregation,
    /// Defaults to three cells.
    #[arg(long)]
    pub fill_radius: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub min_neighbors: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub hillshade: Option<PathBuf>,
    /// Decimals written per cell; `shortest` keeps every bit.
    #[arg(long, default_value = "3")]
    pub decimals: String,
}

#[derive(Debug, Args)]
pub struct DemShadeArgs {
    #[arg(long)]
    pub dem: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 315.0)]
    pub azimuth: f64,
    #[arg(long, default_value_t = 45.0)]
    pub sun_altitude: f64,
}

/// Epochs come either from a mission (`--mission` + `--epoch`) or from
/// grid files (`--dem` + `--origin`).
#[derive(Debug, Args)]
pub struct Source {
    #[arg(long)]
    pub mission: Option<String>,
    #[arg(long = "epoch")]
    pub epochs: Vec<String>,
    #[arg(long = "dem")]
    pub dems: Vec<PathBuf>,
    /// Frame of the grid files, `lat,lon[,alt]`.
    #[arg(long, value_parser = parse_geo)]
    pub origin: Option<GeoPoint>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub source: Source,
    /// GeoJSON LineString file.
    #[arg(long)]
    pub line: PathBuf,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value = "")]
    pub label: String,
    /// Writes `<dir>/<epoch>.csv` per profile.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 0.2)]
    pub threshold: f64,
    #[arg(long, default_value_t = 100.0)]
    pub standoff: f64,
    #[arg(long, default_value_t = 4)]
    pub min_cells: usize,
    /// Zones and buffers as GeoJSON.
    #[arg(long)]
    pub geojson: Option<PathBuf>,
    /// Delta grid as ASCII grid.
    #[arg(long)]
    pub delta: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub mission: String,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value_t = 0.2)]
    pub threshold: f64,
    #[arg(long, default_value_t = 100.0)]
    pub standoff: f64,
    #[arg(long, default_value_t = 0.05)]
    pub safety_budget: f64,
    #[arg(long, default_value_t = 4)]
    pub min_cells: usize,
    /// Markdown path; the sidecar goes next to it with a `.json` extension.
    /// Prints markdown to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value = "blessem-breach")]
    pub preset: String,
    /// True water-surface drop between the epochs, metres.
    #[arg(long, default_value_t = 0.4)]
    pub drop: f64,
    /// Points per square metre.
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum MissionCommand {
    Create {
        #[arg(long)]
        name: String,
        #[arg(long, value_parser = parse_geo)]
        origin: GeoPoint,
        /// GeoJSON survey polygon.
        #[arg(long)]
        polygon: Option<PathBuf>,
    },
    List,
    Show {
        id: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum EpochCommand {
    /// Register a point cloud; builds DEM and hillshade.
    Add {
        #[arg(long)]
        mission: String,
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long, value_parser = parse_time)]
        captured_at: DateTime<Utc>,
        #[arg(long)]
        id: Option<String>,
        #[arg(long, default_value_t = 0.25)]
        cell_size: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum InspectCommand {
    Add {
        #[arg(long)]
        mission: String,
        #[arg(long, value_parser = parse_geo)]
        location: GeoPoint,
        #[arg(long)]
        risk: Risk,
        #[arg(long, default_value = "")]
        note: String,
    },
    /// Create or update a point by id.
    Set {
        #[arg(long)]
        mission: String,
        #[arg(long)]
        id: String,
        #[arg(long, value_parser = parse_geo)]
        location: Option<GeoPoint>,
        #[arg(long)]
        risk: Option<Risk>,
        #[arg(long)]
        status: Option<InspectionStatus>,
        #[arg(long)]
        note: Option<String>,
        #[arg(long)]
        audit_note: Option<String>,
    },
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn read_text(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write_text(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
}

pub fn run(cli: Cli) -> Result<()> {
    let data_dir = cli.data_dir;
    let store =
        || Store::open(&data_dir).with_context(|| format!("opening store {}", data_dir.display()));
    match cli.command {
        Command::Serve(a) => serve(store()?, a),
        Command::Plan(a) => plan(&store, a),
        Command::Dem(DemCommand::Build(a)) => dem_build(a),
        Command::Dem(DemCommand::Shade(a)) => {
            let grid = read_asc(&a.dem)?;
            render_hillshade(&grid, a.azimuth, a.sun_altitude)?.write_png(&a.out)?;
            Ok(())
        }
        Command::Profile(a) => profile(&store, a),
        Command::Diff(a) => diff(&store, a),
        Command::Report(a) => report(&store()?, a),
        Command::Synth(a) => synth(a),
        Command::Mission(MissionCommand::Create {
            name,
            origin,
            polygon,
        }) => {
            let survey_polygon = match polygon {
                Some(p) => Some(SurveyPolygon::new(parse_polygon(&read_text(&p)?)?)?),
                None => None,
            };
            print_json(&store()?.create_mission(NewMission {
                name,
                origin,
                survey_polygon,
            })?)
        }
        Command::Mission(MissionCommand::List) => {
            for m in store()?.list_missions()? {
                println!("{}\t{}\t{} epochs", m.id, m.name, m.epochs.len());
            }
            Ok(())
        }
        Command::Mission(MissionCommand::Show { id }) => print_json(&store()?.get_mission(&id)?),
        Command::Epoch(EpochCommand::Add {
            mission,
            cloud,
            captured_at,
            id,
            cell_size,
        }) => {
            let params = DemBuildParams {
                cell_size,
                ..Default::default()
            };
            print_json(&store()?.register_epoch_file(
                &mission,
                &cloud,
                captured_at,
                id.as_deref(),
                &params,
            )?)
        }
        Command::Inspect(InspectCommand::Add {
            mission,
            location,
            risk,
            note,
        }) => print_json(&store()?.add_inspection_point(&mission, location, risk, &note)?),
        Command::Inspect(InspectCommand::Set {
            mission,
            id,
            location,
            risk,
            status,
            note,
            audit_note,
        }) => {
            let req = InspectionUpsert {
                location,
                risk,
                status,
                note,
                audit_note,
            };
            print_json(&store()?.upsert_inspection_point(&mission, &id, &req)?)
        }
        Command::Schemas { out } => {
            for f in schema::write_all(&out)? {
                println!("{}", out.join(f).display());
            }
            Ok(())
        }
    }
}

fn serve(store: Store, a: ServeArgs) -> Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let addr = format!("{}:{}", a.host, a.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        tracing::info!(
            "listening on http://{addr}, data in {}",
            store.root().display()
        );
        let app = api::router(AppState::new(store), a.console_dir);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

fn plan(store: &dyn Fn() -> Result<Store>, a: PlanArgs) -> Result<()> {
    let catalog = match &a.camera_catalog {
        Some(p) => CameraCatalog::parse(&read_text(p)?)?,
        None => CameraCatalog::builtin(),
    };
    let params = CoverageParams {
        altitude_agl: a.altitude,
        side_overlap: a.side_overlap,
        front_overlap: a.front_overlap,
        heading: a.heading,
        cruise_speed: a.speed,
        ..Default::default()
    };
    let polygon_text = read_text(&a.polygon)?;
    let (plan, geojson) = match &a.mission {
        Some(id) => {
            let req = PlanRequest {
                polygon: Some(serde_json::from_str(&polygon_text).context("polygon file")?),
                camera: a.camera.clone(),
                camera_spec: None,
                params,
            };
            let s = store()?;
            let out = ops::plan(&s, &catalog, id, &req)?;
            eprintln!("saved {} in mission {id}", out.plan_ref.plan_id);
            (out.plan, s.latest_plan_geojson(id)?)
        }
        None => {
            let ring = parse_polygon(&polygon_text)?;
            let origin = MissionOrigin::new(a.origin.unwrap_or(ring[0]))?;
            let poly = SurveyPolygon::new(ring)?;
            let plan = plan_coverage(&poly, catalog.get(&a.camera)?, &params, &origin)?;
            let text = floodscout_core::coverage::export_waypoints(&plan);
            (plan, text)
        }
    };
    let s = &plan.stats;
    eprintln!(
        "{} lines, {} photos, {:.0} m path, {:.1} min, GSD {:.2} cm/px, heading {:.1}°",
        s.line_count,
        s.photo_count,
        s.total_path_m,
        s.est_flight_s / 60.0,
        s.est_gsd * 100.0,
        plan.heading_deg
    );
    match &a.out {
        Some(p) => write_text(p, &geojson)?,
        None => print!("{geojson}"),
    }
    if let Some(p) = &a.json {
        write_text(p, &serde_json::to_string_pretty(&plan)?)?;
    }
    Ok(())
}

fn dem_build(a: DemBuildArgs) -> Result<()> {
    let raw = read_xyz(&a.cloud)?;
    let anchor = match (a.origin, raw.crs) {
        (Some(o), _) => o,
        (None, floodscout_core::dem::CloudCrs::Enu(Some(anchor))) => anchor,
        (None, _) => bail!("--origin is required for clouds without a `#crs enu` anchor"),
    };
    let cloud = raw.into_enu(&MissionOrigin::new(anchor)?)?;
    let params = DemBuildParams {
        cell_size: a.cell_size,
        aggregation: a.aggregation,
        fill_radius: a.fill_radius,
        min_neighbors: a.min_neighbors,
        ..Default::default()
    };
    let decimals = match a.decimals.as_str() {
        "shortest" => None,
        d => Some(d.parse::<usize>().context("--decimals")?),
    };
    let (grid, stats) = build_dem(&cloud, &params)?;
    write_asc_with(&grid, &a.out, decimals)?;
    if let Some(p) = &a.hillshade {
        render_hillshade(&grid, params.azimuth_deg, params.sun_altitude_deg)?.write_png(p)?;
    }
    eprintln!(
        "{} points -> {}x{} cells, {} filled, {:.1}% valid",
        stats.point_count,
        stats.n_cols,
        stats.n_rows,
        stats.filled_cells,
        stats.valid_cell_fraction * 100.0
    );
    Ok(())
}

/// Grid files with their labels, in the frame of `--origin`.
fn file_grids(src: &Source) -> Result<(MissionOrigin, Vec<DemGrid>)> {
    let origin = src
        .origin
        .context("--origin is required with --dem files")
        .and_then(|o| Ok(MissionOrigin::new(o)?))?;
    let grids = src
        .dems
        .iter()
        .map(|p| {
            let label = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(read_asc(p)?.with_epoch(label, None))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((origin, grids))
}

fn profile(store: &dyn Fn() -> Result<Store>, a: ProfileArgs) -> Result<()> {
    let line_text = read_text(&a.line)?;
    let out = match &a.source.mission {
        Some(id) => {
            let req = ProfileRequest {
                line: serde_json::from_str(&line_text).context("line file")?,
                epochs: a.source.epochs.clone(),
                step_m: a.step,
                label: a.label.clone(),
            };
            ops::profiles(&store()?, id, &req)?
        }
        None => {
            let (origin, grids) = file_grids(&a.source)?;
            if grids.is_empty() {
                bail!("give --mission with --epoch ids, or --dem files");
            }
            let line = ProfileLine::new(parse_line_string(&line_text)?, a.label.clone());
            let profiles = grids
                .iter()
                .map(|g| extract_profile(g, &line, a.step, &origin))
                .collect::<Result<Vec<_>, _>>()?;
            let comparisons = profiles
                .windows(2)
                .map(|w| compare_profiles(&w[0], &w[1]))
                .collect::<Result<Vec<_>, _>>()?;
            crate::types::ProfileResponse {
                csv: profiles.iter().map(profile_csv).collect(),
                profiles,
                comparisons,
            }
        }
    };
    if let Some(dir) = &a.csv_dir {
        std::fs::create_dir_all(dir)?;
        for (p, csv) in out.profiles.iter().zip(&out.csv) {
            write_text(&dir.join(format!("{}.csv", p.epoch_id)), csv)?;
        }
    }
    for c in &out.comparisons {
        if let Some(s) = &c.summary {
            eprintln!(
                "{} -> {}: mean {:+.3} m, min {:+.3} m, max {:+.3} m over {} stations",
                c.epoch_a, c.epoch_b, s.mean, s.min, s.max, s.valid_pairs
            );
        }
    }
    print_json(&out)
}

fn diff(store: &dyn Fn() -> Result<Store>, a: DiffArgs) -> Result<()> {
    let (out, delta) = match &a.source.mission {
        Some(id) => {
            let [ea, eb] = a.source.epochs.as_slice() else {
                bail!("give exactly two --epoch ids");
            };
            let req = DiffRequest {
                epoch_a: ea.clone(),
                epoch_b: eb.clone(),
                threshold_m: a.threshold,
                standoff_m: a.standoff,
                min_cells: a.min_cells,
            };
            let s = store()?;
            let delta = match &a.delta {
                Some(_) => {
                    Some(diff_dem(&s.load_dem(id, ea)?, &s.load_dem(id, eb)?, a.threshold)?.0)
                }
                None => None,
            };
            (ops::diff(&s, id, &req)?, delta)
        }
        None => {
            let (origin, grids) = file_grids(&a.source)?;
            let [ga, gb] = grids.as_slice() else {
                bail!("give exactly two --dem files");
            };
            let (delta, change) = diff_dem(ga, gb, a.threshold)?;
            let zones = detect_hazard_zones(&delta, a.threshold, a.min_cells)?;
            let advisory = standoff_buffer(&zones, a.standoff)?;
            let geojson = hazard_geojson(&zones, &advisory, &origin)?;
            (
                crate::types::DiffResponse {
                    change,
                    zones,
                    advisory,
                    geojson,
                },
                Some(delta),
            )
        }
    };
    if let (Some(p), Some(d)) = (&a.delta, &delta) {
        write_asc_with(d, p, Some(3))?;
    }
    if let Some(p) = &a.geojson {
        write_text(p, &serde_json::to_string_pretty(&out.geojson)?)?;
    }
    let c = &out.change;
    eprintln!(
        "mean delta {:+.3} m, mean drop {:.3} m, {} zone(s), {:.1}% cells valid",
        c.mean_delta_m,
        c.mean_drop_m(),
        out.zones.len(),
        c.valid_cell_fraction * 100.0
    );
    print_json(&out.change)
}

fn report(store: &Store, a: ReportArgs) -> Result<()> {
    let opts = floodscout_core::store::ReportOptions {
        threshold_m: a.threshold,
        standoff_m: a.standoff,
        safety_budget_m: a.safety_budget,
        min_cells: a.min_cells,
    };
    let r = store.generate_report(&a.mission, &a.a, &a.b, &opts)?;
    match &a.out {
        Some(p) => {
            write_text(p, &r.markdown)?;
            let sidecar = p.with_extension("json");
            write_text(&sidecar, &r.json())?;
            eprintln!("wrote {} and {}", p.display(), sidecar.display());
        }
        None => print!("{}", r.markdown),
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut s = preset(&a.preset, a.drop)
        .with_context(|| format!("known presets: {}", PRESETS.join(", ")))?;
    if let Some(d) = a.density {
        s.pair.point_density = d;
    }
    if let Some(sigma) = a.sigma {
        s.pair.noise_sigma = sigma;
    }
    if let Some(seed) = a.seed {
        s.pair.terrain.seed = seed;
    }
    let (ca, cb) = make_epoch_pair(&s.pair)?;
    std::fs::create_dir_all(&a.out)?;
    let files = write_scenario_files(&s, &ca, &cb, &a.out)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}
