use super::{InspectionPoint, InspectionStatus, Result, Risk, Store, StoreError};
use crate::analytics::{
    detect_hazard_zones, diff_dem, estimate_recession_rate, recommend_revisit, standoff_buffer,
    ChangeReport, RecessionRate, DEFAULT_MIN_CELLS, DEFAULT_SAFETY_BUDGET_M,
};
use crate::dem::GridStats;
use crate::geodesy::MissionOrigin;
use crate::geometry::{signed_area, Vec2};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(default)]
pub struct ReportOptions {
    /// Drop (m) at which a cell counts toward the exceeding area and zones.
    pub threshold_m: f64,
    pub standoff_m: f64,
    pub safety_budget_m: f64,
    pub min_cells: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            threshold_m: 0.2,
            standoff_m: 100.0,
            safety_budget_m: DEFAULT_SAFETY_BUDGET_M,
            min_cells: DEFAULT_MIN_CELLS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct PlanSummary {
    pub plan_id: String,
    pub camera: String,
    pub photo_count: usize,
    pub line_count: usize,
    pub est_flight_s: f64,
    pub total_path_m: f64,
    pub est_gsd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct EpochSummary {
    pub epoch_id: String,
    pub captured_at: DateTime<Utc>,
    pub point_count: usize,
    pub valid_cell_fraction: f64,
    pub dem: Option<GridStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct ZoneSummary {
    pub cell_count: usize,
    pub peak_drop_m: f64,
    pub hull_area_m2: f64,
    pub buffer_area_m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct HazardSummary {
    pub threshold_m: f64,
    pub min_cells: usize,
    pub standoff_m: f64,
    pub zones: Vec<ZoneSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct InspectionChecklist {
    pub open: usize,
    pub inspected: usize,
    pub inaccessible: usize,
    pub high: Vec<InspectionPoint>,
    pub medium: Vec<InspectionPoint>,
    pub low: Vec<InspectionPoint>,
}

/// JSON sidecar of a mission report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct ReportData {
    pub mission_id: String,
    pub mission_name: String,
    pub origin: MissionOrigin,
    pub created_at: DateTime<Utc>,
    pub plan: Option<PlanSummary>,
    pub epochs: Vec<EpochSummary>,
    pub change: ChangeReport,
    pub elapsed_h: f64,
    pub recession: RecessionRate,
    pub safety_budget_m: f64,
    pub revisit_h: f64,
    pub hazard: HazardSummary,
    pub inspection: InspectionChecklist,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionReport {
    pub data: ReportData,
    pub markdown: String,
}

impl MissionReport {
    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.data).expect("report serializes");
        s.push('\n');
        s
    }
}

fn ts(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn area(poly: &[crate::geodesy::EnuPoint]) -> f64 {
    let ring: Vec<Vec2> = poly.iter().map(|p| Vec2::new(p.east, p.north)).collect();
    signed_area(&ring).abs()
}

impl Store {
    /// Compares two registered epochs and renders the mission report. Reads
    /// only; the same store state always yields the same bytes.
    pub fn generate_report(
        &self,
        mission_id: &str,
        epoch_a: &str,
        epoch_b: &str,
        opts: &ReportOptions,
    ) -> Result<MissionReport> {
        let m = self.get_mission(mission_id)?;
        let (ra, rb) = (m.epoch(epoch_a)?, m.epoch(epoch_b)?);
        if rb.captured_at <= ra.captured_at {
            return Err(StoreError::Invalid(format!(
                "epoch `{epoch_b}` must be captured after `{epoch_a}`"
            )));
        }
        let a = self.load_dem(mission_id, epoch_a)?;
        let b = self.load_dem(mission_id, epoch_b)?;
        let (delta, change) = diff_dem(&a, &b, opts.threshold_m)?;
        let elapsed_h = (rb.captured_at - ra.captured_at).num_milliseconds() as f64 / 3_600_000.0;
        let recession = estimate_recession_rate(&change, elapsed_h)?;
        let revisit_h = recommend_revisit(recession.rate_m_per_h, opts.safety_budget_m)?;
        let zones = if opts.threshold_m > 0.0 {
            detect_hazard_zones(&delta, opts.threshold_m, opts.min_cells)?
        } else {
            Vec::new()
        };
        let advisory = standoff_buffer(&zones, opts.standoff_m)?;

        let plan = m.latest_plan().map(|r| PlanSummary {
            plan_id: r.plan_id.clone(),
            camera: r.camera.clone(),
            photo_count: r.stats.photo_count,
            line_count: r.stats.line_count,
            est_flight_s: r.stats.est_flight_s,
            total_path_m: r.stats.total_path_m,
            est_gsd: r.stats.est_gsd,
        });
        let by = |risk: Risk| -> Vec<InspectionPoint> {
            m.inspection_points
                .iter()
                .filter(|p| p.risk == risk)
                .cloned()
                .collect()
        };
        let count =
            |s: InspectionStatus| m.inspection_points.iter().filter(|p| p.status == s).count();
        let data = ReportData {
            mission_id: m.id.clone(),
            mission_name: m.name.clone(),
            origin: m.origin,
            created_at: m.created_at,
            plan,
            epochs: [ra, rb]
                .iter()
                .map(|e| EpochSummary {
                    epoch_id: e.epoch_id.clone(),
                    captured_at: e.captured_at,
                    point_count: e.stats.point_count,
                    valid_cell_fraction: e.stats.valid_cell_fraction,
                    dem: e.dem_stats,
                })
                .collect(),
            change,
            elapsed_h,
            recession,
            safety_budget_m: opts.safety_budget_m,
            revisit_h,
            hazard: HazardSummary {
                threshold_m: opts.threshold_m,
                min_cells: opts.min_cells,
                standoff_m: opts.standoff_m,
                zones: zones
                    .iter()
                    .zip(&advisory.buffer_polygons)
                    .map(|(z, b)| ZoneSummary {
                        cell_count: z.cell_count,
                        peak_drop_m: z.peak_drop_m,
                        hull_area_m2: area(&z.polygon),
                        buffer_area_m2: area(b),
                    })
                    .collect(),
            },
            inspection: InspectionChecklist {
                open: count(InspectionStatus::Open),
                inspected: count(InspectionStatus::Inspected),
                inaccessible: count(InspectionStatus::Inaccessible),
                high: by(Risk::High),
                medium: by(Risk::Medium),
                low: by(Risk::Low),
            },
        };
        let markdown = render_markdown(&data);
        Ok(MissionReport { data, markdown })
    }
}

pub fn render_markdown(d: &ReportData) -> String {
    let mut s = String::new();
    let o = &d.origin.anchor;
    let (ea, eb) = (&d.epochs[0], &d.epochs[1]);
    let _ = writeln!(s, "# Mission report: {}\n", d.mission_name);
    let _ = writeln!(s, "- Mission id: `{}`", d.mission_id);
    let _ = writeln!(s, "- Origin: {:.6}, {:.6}, {:.1} m", o.lat, o.lon, o.alt);
    let _ = writeln!(s, "- Created: {}", ts(&d.created_at));
    let _ = writeln!(
        s,
        "- Compared epochs: `{}` and `{}`\n",
        ea.epoch_id, eb.epoch_id
    );

    let _ = writeln!(s, "## Flight plan\n");
    match &d.plan {
        Some(p) => {
            let _ = writeln!(s, "- Plan: `{}` ({})", p.plan_id, p.camera);
            let _ = writeln!(s, "- Photos: {}", p.photo_count);
            let _ = writeln!(s, "- Flight lines: {}", p.line_count);
            let _ = writeln!(
                s,
                "- Estimated flight time: {:.1} s ({:.1} min)",
                p.est_flight_s,
                p.est_flight_s / 60.0
            );
            let _ = writeln!(s, "- Path length: {:.1} m", p.total_path_m);
            let _ = writeln!(s, "- GSD: {:.2} cm/px\n", p.est_gsd * 100.0);
        }
        None => {
            let _ = writeln!(s, "No flight plan recorded.\n");
        }
    }

    let _ = writeln!(s, "## Epochs\n");
    let _ = writeln!(
        s,
        "| Epoch | Captured (UTC) | Points | Valid cells | Min (m) | Mean (m) | Max (m) |"
    );
    let _ = writeln!(s, "|---|---|---:|---:|---:|---:|---:|");
    for e in &d.epochs {
        let (lo, mean, hi) = match e.dem {
            Some(g) => (
                format!("{:.3}", g.min),
                format!("{:.3}", g.mean),
                format!("{:.3}", g.max),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let _ = writeln!(
            s,
            "| `{}` | {} | {} | {:.1} % | {lo} | {mean} | {hi} |",
            e.epoch_id,
            ts(&e.captured_at),
            e.point_count,
            e.valid_cell_fraction * 100.0
        );
    }

    let c = &d.change;
    let _ = writeln!(s, "\n## Change\n");
    let _ = writeln!(
        s,
        "Deltas are `{}` minus `{}`; negative means the surface fell.\n",
        c.epoch_b, c.epoch_a
    );
    let _ = writeln!(s, "- mean drop {:.3} m", -c.mean_delta_m);
    let _ = writeln!(s, "- Mean delta: {:.3} m", c.mean_delta_m);
    let _ = writeln!(s, "- Median delta: {:.3} m", c.median_delta_m);
    let _ = writeln!(s, "- 5th percentile delta: {:.3} m", c.p05_delta_m);
    let _ = writeln!(s, "- Max drop: {:.3} m", c.max_drop_m);
    let _ = writeln!(
        s,
        "- Area with drop >= {:.3} m: {:.1} m²",
        c.threshold_m, c.area_exceeding_m2
    );
    let _ = writeln!(
        s,
        "- Cells valid in both epochs: {:.1} %",
        c.valid_cell_fraction * 100.0
    );

    let h = &d.hazard;
    let _ = writeln!(s, "\n## Hazard zones and standoff\n");
    let _ = writeln!(
        s,
        "- Zones with drop >= {:.3} m and at least {} cells: {}",
        h.threshold_m,
        h.min_cells,
        h.zones.len()
    );
    let _ = writeln!(s, "- standoff {:.1} m around every zone", h.standoff_m);
    if !h.zones.is_empty() {
        let _ = writeln!(
            s,
            "\n| Zone | Cells | Peak drop (m) | Hull area (m²) | Buffer area (m²) |"
        );
        let _ = writeln!(s, "|---:|---:|---:|---:|---:|");
        for (i, z) in h.zones.iter().enumerate() {
            let _ = writeln!(
                s,
                "| {} | {} | {:.3} | {:.1} | {:.1} |",
                i + 1,
                z.cell_count,
                z.peak_drop_m,
                z.hull_area_m2,
                z.buffer_area_m2
            );
        }
    }

    let r = &d.recession;
    let _ = writeln!(s, "\n## Revisit\n");
    let _ = writeln!(s, "- Elapsed between epochs: {:.1} h", d.elapsed_h);
    let trend = match r.trend {
        crate::analytics::Trend::Falling => "falling",
        crate::analytics::Trend::Rising => "rising",
        crate::analytics::Trend::Steady => "steady",
    };
    let _ = writeln!(s, "- Rate: {:.4} m/h ({trend})", r.rate_m_per_h);
    let _ = writeln!(s, "- Safety budget: {:.3} m", d.safety_budget_m);
    let _ = writeln!(s, "- revisit {:.1} h", d.revisit_h);

    let ins = &d.inspection;
    let _ = writeln!(s, "\n## Inspection checklist\n");
    if ins.high.is_empty() && ins.medium.is_empty() && ins.low.is_empty() {
        let _ = writeln!(s, "Inspection points: none recorded.");
    } else {
        let _ = writeln!(
            s,
            "- Open: {}, inspected: {}, inaccessible: {}",
            ins.open, ins.inspected, ins.inaccessible
        );
        for (label, pts) in [
            ("High risk", &ins.high),
            ("Medium risk", &ins.medium),
            ("Low risk", &ins.low),
        ] {
            if pts.is_empty() {
                continue;
            }
            let _ = writeln!(s, "\n### {label}\n");
            for p in pts {
                let mark = if p.status == InspectionStatus::Open {
                    " "
                } else {
                    "x"
                };
                let _ = write!(
                    s,
                    "- [{mark}] `{}` at {:.6}, {:.6}: {}",
                    p.id, p.location.lat, p.location.lon, p.status
                );
                if !p.note.is_empty() {
                    let _ = write!(s, " ({})", p.note);
                }
                s.push('\n');
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::DemBuildParams;
    use crate::store::tests::{clock, new_mission, small_cloud};
    use chrono::TimeZone;

    fn setup(dir: &std::path::Path) -> Store {
        let store = Store::with_clock(dir, clock()).unwrap();
        store.create_mission(new_mission("m")).unwrap();
        let p = DemBuildParams {
            cell_size: 0.5,
            ..Default::default()
        };
        let t0 = Utc.with_ymd_and_hms(2021, 7, 16, 12, 0, 0).unwrap();
        store
            .register_epoch("m", &small_cloud(10.0), t0, Some("a"), &p)
            .unwrap();
        store
            .register_epoch(
                "m",
                &small_cloud(9.6),
                t0 + chrono::Duration::hours(24),
                Some("b"),
                &p,
            )
            .unwrap();
        store
    }

    #[test]
    fn uniform_drop_report() {
        let dir = tempfile::tempdir().unwrap();
        let store = setup(dir.path());
        let r = store
            .generate_report("m", "a", "b", &ReportOptions::default())
            .unwrap();
        assert!(r.markdown.contains("mean drop 0.400 m"), "{}", r.markdown);
        assert!(r.markdown.contains("revisit 3.0 h"));
        assert!(r.markdown.contains("standoff 100.0 m"));
        assert!(r.markdown.contains("none recorded"));
        assert!(r.markdown.contains("No flight plan recorded."));
        assert_eq!(r.data.hazard.zones.len(), 1);
        assert!((r.data.elapsed_h - 24.0).abs() < 1e-12);
        let again = store
            .generate_report("m", "a", "b", &ReportOptions::default())
            .unwrap();
        assert_eq!(r.markdown, again.markdown);
        assert_eq!(r.json(), again.json());
    }

    #[test]
    fn checklist_counts() {
        let dir = tempfile::tempdir().unwrap();
        let store = setup(dir.path());
        let loc = crate::geodesy::GeoPoint::new(50.8061, 6.7651, 0.0).unwrap();
        store
            .add_inspection_point("m", loc, Risk::High, "a")
            .unwrap();
        store
            .add_inspection_point("m", loc, Risk::Low, "b")
            .unwrap();
        store
            .add_inspection_point("m", loc, Risk::High, "c")
            .unwrap();
        store
            .set_status("m", "ip-002", InspectionStatus::Inspected, None)
            .unwrap();
        let r = store
            .generate_report("m", "a", "b", &ReportOptions::default())
            .unwrap();
        assert_eq!(r.data.inspection.open, 2);
        assert_eq!(r.data.inspection.high.len(), 2);
        assert!(r
            .markdown
            .contains("- Open: 2, inspected: 1, inaccessible: 0"));
        assert!(r.markdown.contains("- [x] `ip-002`"));
    }

    #[test]
    fn missing_or_reversed_epochs() {
        let dir = tempfile::tempdir().unwrap();
        let store = setup(dir.path());
        let o = ReportOptions::default();
        assert!(matches!(
            store.generate_report("m", "a", "zz", &o),
            Err(StoreError::NotFound(_))
        ));
        assert!(matches!(
            store.generate_report("m", "b", "a", &o),
            Err(StoreError::Invalid(_))
        ));
    }
}
