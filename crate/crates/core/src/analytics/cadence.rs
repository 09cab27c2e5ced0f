use super::{AnalyticsError, ChangeReport};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SAFETY_BUDGET_M: f64 = 0.05;
pub const MIN_REVISIT_H: f64 = 0.25;
pub const MAX_REVISIT_H: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Falling,
    Rising,
    Steady,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct RecessionRate {
    /// Magnitude of the mean change per hour.
    pub rate_m_per_h: f64,
    pub trend: Trend,
    pub elapsed_h: f64,
}

pub fn estimate_recession_rate(
    report: &ChangeReport,
    elapsed_h: f64,
) -> Result<RecessionRate, AnalyticsError> {
    if !(elapsed_h.is_finite() && elapsed_h > 0.0) {
        return Err(AnalyticsError::InvalidParam(format!(
            "elapsed time must be positive, got {elapsed_h} h"
        )));
    }
    let m = report.mean_delta_m;
    let trend = if m < 0.0 {
        Trend::Falling
    } else if m > 0.0 {
        Trend::Rising
    } else {
        Trend::Steady
    };
    Ok(RecessionRate {
        rate_m_per_h: m.abs() / elapsed_h,
        trend,
        elapsed_h,
    })
}

/// Hours until the surface may have moved by `safety_budget_m`, clamped to
/// [`MIN_REVISIT_H`, `MAX_REVISIT_H`].
pub fn recommend_revisit(rate_m_per_h: f64, safety_budget_m: f64) -> Result<f64, AnalyticsError> {
    if !(rate_m_per_h.is_finite() && rate_m_per_h >= 0.0) {
        return Err(AnalyticsError::InvalidParam(format!(
            "rate must be non-negative, got {rate_m_per_h}"
        )));
    }
    if !(safety_budget_m.is_finite() && safety_budget_m > 0.0) {
        return Err(AnalyticsError::InvalidParam(format!(
            "safety budget must be positive, got {safety_budget_m}"
        )));
    }
    if rate_m_per_h == 0.0 {
        return Ok(MAX_REVISIT_H);
    }
    Ok((safety_budget_m / rate_m_per_h).clamp(MIN_REVISIT_H, MAX_REVISIT_H))
}
