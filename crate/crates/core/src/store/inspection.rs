use super::{Result, Store, StoreError};
use crate::geodesy::GeoPoint;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "lowercase")]
pub enum Risk {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "lowercase")]
pub enum InspectionStatus {
    Open,
    Inspected,
    Inaccessible,
}

impl InspectionStatus {
    /// Open points may be closed either way; closed points stay closed.
    pub fn can_become(self, to: InspectionStatus) -> bool {
        use InspectionStatus::*;
        self == to || (self == Open && matches!(to, Inspected | Inaccessible))
    }
}

impl fmt::Display for Risk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Risk::Low => "low",
            Risk::Medium => "medium",
            Risk::High => "high",
        })
    }
}

impl fmt::Display for InspectionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InspectionStatus::Open => "open",
            InspectionStatus::Inspected => "inspected",
            InspectionStatus::Inaccessible => "inaccessible",
        })
    }
}

impl std::str::FromStr for Risk {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "low" => Ok(Risk::Low),
            "medium" => Ok(Risk::Medium),
            "high" => Ok(Risk::High),
            _ => Err(format!("unknown risk `{s}` (low|medium|high)")),
        }
    }
}

impl std::str::FromStr for InspectionStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "open" => Ok(InspectionStatus::Open),
            "inspected" => Ok(InspectionStatus::Inspected),
            "inaccessible" => Ok(InspectionStatus::Inaccessible),
            _ => Err(format!(
                "unknown status `{s}` (open|inspected|inaccessible)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct AuditEntry {
    pub at: DateTime<Utc>,
    pub change: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct InspectionPoint {
    pub id: String,
    pub location: GeoPoint,
    pub risk: Risk,
    pub status: InspectionStatus,
    pub note: String,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub audit: Vec<AuditEntry>,
}

/// Fields of a create-or-update request. Creating needs `location` and
/// `risk`; changing the risk of an existing point needs `audit_note`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(default)]
pub struct InspectionUpsert {
    pub location: Option<GeoPoint>,
    pub risk: Option<Risk>,
    pub status: Option<InspectionStatus>,
    pub note: Option<String>,
    pub audit_note: Option<String>,
}

fn apply(p: &mut InspectionPoint, req: &InspectionUpsert, now: DateTime<Utc>) -> Result<()> {
    let audit_note = req.audit_note.clone().unwrap_or_default();
    let mut entries = Vec::new();
    if let Some(to) = req.status {
        if !p.status.can_become(to) {
            return Err(StoreError::Transition { from: p.status, to });
        }
    }
    if let Some(risk) = req.risk {
        if risk != p.risk {
            if audit_note.trim().is_empty() {
                return Err(StoreError::Invalid(format!(
                    "re-assessing risk {} -> {risk} requires an audit note",
                    p.risk
                )));
            }
            entries.push(format!("risk {} -> {risk}", p.risk));
            p.risk = risk;
        }
    }
    if let Some(loc) = req.location {
        loc.validate()?;
        if loc != p.location {
            entries.push(format!("moved to {:.6}, {:.6}", loc.lat, loc.lon));
            p.location = loc;
        }
    }
    if let Some(to) = req.status {
        if to != p.status {
            entries.push(format!("status {} -> {to}", p.status));
            p.status = to;
        }
    }
    if let Some(note) = &req.note {
        if *note != p.note {
            entries.push("note updated".into());
            p.note = note.clone();
        }
    }
    if !entries.is_empty() {
        p.updated_at = now;
        for change in entries {
            p.audit.push(AuditEntry {
                at: now,
                change,
                note: audit_note.clone(),
            });
        }
    }
    Ok(())
}

fn next_id(points: &[InspectionPoint]) -> String {
    (points.len() + 1..)
        .map(|n| format!("ip-{n:03}"))
        .find(|c| points.iter().all(|p| &p.id != c))
        .expect("unbounded range")
}

impl Store {
    pub fn add_inspection_point(
        &self,
        mission_id: &str,
        location: GeoPoint,
        risk: Risk,
        note: &str,
    ) -> Result<InspectionPoint> {
        let req = InspectionUpsert {
            location: Some(location),
            risk: Some(risk),
            note: Some(note.to_string()),
            ..Default::default()
        };
        self.create_point(mission_id, None, &req)
    }

    fn create_point(
        &self,
        mission_id: &str,
        id: Option<&str>,
        req: &InspectionUpsert,
    ) -> Result<InspectionPoint> {
        let now = self.now();
        self.mutate(mission_id, |m, _| {
            let id = match id {
                Some(id) => id.to_string(),
                None => next_id(&m.inspection_points),
            };
            Self::insert_point(m, id, req, now)
        })
    }

    fn insert_point(
        m: &mut super::Mission,
        id: String,
        req: &InspectionUpsert,
        now: DateTime<Utc>,
    ) -> Result<InspectionPoint> {
        if !super::is_safe_id(&id) {
            return Err(StoreError::Invalid(format!(
                "inspection point id `{id}` is not allowed"
            )));
        }
        let (Some(location), Some(risk)) = (req.location, req.risk) else {
            return Err(StoreError::Invalid(
                "a new inspection point needs `location` and `risk`".into(),
            ));
        };
        location.validate()?;
        let mut p = InspectionPoint {
            id,
            location,
            risk,
            status: InspectionStatus::Open,
            note: req.note.clone().unwrap_or_default(),
            created_at: now,
            updated_at: now,
            audit: vec![AuditEntry {
                at: now,
                change: format!("created ({risk} risk)"),
                note: req.audit_note.clone().unwrap_or_default(),
            }],
        };
        let rest = InspectionUpsert {
            status: req.status,
            ..Default::default()
        };
        apply(&mut p, &rest, now)?;
        m.inspection_points.push(p.clone());
        Ok(p)
    }

    /// Creates the point `point_id` if it does not exist, otherwise updates it.
    pub fn upsert_inspection_point(
        &self,
        mission_id: &str,
        point_id: &str,
        req: &InspectionUpsert,
    ) -> Result<InspectionPoint> {
        let now = self.now();
        self.mutate(mission_id, |m, _| {
            match m.inspection_points.iter_mut().find(|p| p.id == point_id) {
                Some(p) => {
                    apply(p, req, now)?;
                    Ok(p.clone())
                }
                None => Self::insert_point(m, point_id.to_string(), req, now),
            }
        })
    }

    pub fn set_status(
        &self,
        mission_id: &str,
        point_id: &str,
        status: InspectionStatus,
        note: Option<&str>,
    ) -> Result<InspectionPoint> {
        let now = self.now();
        self.mutate(mission_id, |m, _| {
            let p = m
                .inspection_points
                .iter_mut()
                .find(|p| p.id == point_id)
                .ok_or_else(|| StoreError::NotFound(format!("inspection point `{point_id}`")))?;
            let req = InspectionUpsert {
                status: Some(status),
                audit_note: note.map(str::to_string),
                ..Default::default()
            };
            apply(p, &req, now)?;
            Ok(p.clone())
        })
    }
}
