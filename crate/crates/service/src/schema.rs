//! JSON schemas of every API body, as checked into `schemas/`.

use crate::types::{
    DiffRequest, DiffResponse, ErrorBody, Health, InspectionCreate, PlanRequest, PlanResponse,
    ProfileRequest, ProfileResponse,
};
use floodscout_core::store::{
    EpochRecord, InspectionPoint, InspectionUpsert, Mission, NewMission, ReportData,
};
use schemars::schema_for;
use std::path::Path;

/// `(file stem, schema)` pairs.
pub fn all() -> Vec<(&'static str, schemars::Schema)> {
    vec![
        ("error", schema_for!(ErrorBody)),
        ("health", schema_for!(Health)),
        ("new_mission", schema_for!(NewMission)),
        ("mission", schema_for!(Mission)),
        ("mission_list", schema_for!(Vec<Mission>)),
        ("plan_request", schema_for!(PlanRequest)),
        ("plan_response", schema_for!(PlanResponse)),
        ("epoch_record", schema_for!(EpochRecord)),
        ("profile_request", schema_for!(ProfileRequest)),
        ("profile_response", schema_for!(ProfileResponse)),
        ("diff_request", schema_for!(DiffRequest)),
        ("diff_response", schema_for!(DiffResponse)),
        ("inspection_create", schema_for!(InspectionCreate)),
        ("inspection_upsert", schema_for!(InspectionUpsert)),
        ("inspection_point", schema_for!(InspectionPoint)),
        ("report", schema_for!(ReportData)),
    ]
}

pub fn render(schema: &schemars::Schema) -> String {
    let mut s = serde_json::to_string_pretty(schema).expect("schema serializes");
    s.push('\n');
    s
}

pub fn write_all(dir: &Path) -> std::io::Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, schema) in all() {
        let file = format!("{name}.schema.json");
        std::fs::write(dir.join(&file), render(&schema))?;
        written.push(file);
    }
    Ok(written)
}
