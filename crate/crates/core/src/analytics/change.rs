use super::AnalyticsError;
use crate::dem::{resample_onto, DemGrid};
use serde::{Deserialize, Serialize};

/// Summary of `b − a` over the cells valid in both epochs.
///
/// Drops are reported as positive magnitudes: `max_drop_m` is the largest
/// `−delta` (0 if nothing fell) and `area_exceeding_m2` counts cells with
/// `−delta ≥ threshold_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct ChangeReport {
    pub epoch_a: String,
    pub epoch_b: String,
    pub mean_delta_m: f64,
    pub median_delta_m: f64,
    pub p05_delta_m: f64,
    pub max_drop_m: f64,
    pub area_exceeding_m2: f64,
    pub valid_cell_fraction: f64,
    pub threshold_m: f64,
}

impl ChangeReport {
    /// Mean drop as a positive number when the surface fell.
    pub fn mean_drop_m(&self) -> f64 {
        -self.mean_delta_m
    }
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Cell-wise `b − a` on `a`'s geometry, resampling `b` if needed.
pub fn diff_dem(
    a: &DemGrid,
    b: &DemGrid,
    threshold_m: f64,
) -> Result<(DemGrid, ChangeReport), AnalyticsError> {
    if !(threshold_m.is_finite() && threshold_m >= 0.0) {
        return Err(AnalyticsError::InvalidParam(format!(
            "threshold must be non-negative, got {threshold_m}"
        )));
    }
    let resampled;
    let b = if a.same_geometry(b) {
        b
    } else {
        if !a.overlaps(b) {
            return Err(AnalyticsError::NoOverlap);
        }
        resampled = resample_onto(b, a)?;
        &resampled
    };

    let mut delta = a.clone();
    delta.epoch_id = format!("{}..{}", a.epoch_id, b.epoch_id);
    delta.captured_at = b.captured_at;
    let mut valid = Vec::with_capacity(a.values.len());
    let mut exceeding = 0usize;
    for (i, out) in delta.values.iter_mut().enumerate() {
        let (va, vb) = (a.values[i], b.values[i]);
        if va == a.nodata || vb == b.nodata {
            *out = a.nodata;
            continue;
        }
        let d = vb - va;
        *out = d;
        valid.push(d);
        if -d >= threshold_m {
            exceeding += 1;
        }
    }
    if valid.is_empty() {
        return Err(AnalyticsError::NoValidCells);
    }
    let mean = valid.iter().sum::<f64>() / valid.len() as f64;
    let fraction = valid.len() as f64 / a.values.len() as f64;
    valid.sort_by(f64::total_cmp);
    let report = ChangeReport {
        epoch_a: a.epoch_id.clone(),
        epoch_b: b.epoch_id.clone(),
        mean_delta_m: mean,
        median_delta_m: quantile(&valid, 0.5),
        p05_delta_m: quantile(&valid, 0.05),
        max_drop_m: (-valid[0]).max(0.0),
        area_exceeding_m2: exceeding as f64 * a.cell_area(),
        valid_cell_fraction: fraction,
        threshold_m,
    };
    Ok((delta, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::DEFAULT_NODATA;

    fn grid(f: impl Fn(f64, f64) -> f64) -> DemGrid {
        DemGrid::from_fn(0.0, 0.0, 1.0, 10, 8, f).unwrap()
    }

    #[test]
    fn self_diff_is_zero() {
        let a = grid(|e, n| (e * 0.3).sin() + n);
        let (d, r) = diff_dem(&a, &a, 0.2).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
        assert_eq!(
            (r.mean_delta_m, r.max_drop_m, r.area_exceeding_m2),
            (0.0, 0.0, 0.0)
        );
        assert_eq!(r.valid_cell_fraction, 1.0);
    }

    #[test]
    fn uniform_drop() {
        let a = grid(|e, n| 5.0 + 0.1 * e - 0.05 * n);
        let b = grid(|e, n| 5.0 + 0.1 * e - 0.05 * n - 0.4);
        let (_, r) = diff_dem(&a, &b, 0.2).unwrap();
        assert!((r.mean_delta_m + 0.4).abs() < 1e-9);
        assert!((r.max_drop_m - 0.4).abs() < 1e-9);
        assert!((r.median_delta_m + 0.4).abs() < 1e-9);
        assert_eq!(r.area_exceeding_m2, 80.0);
    }

    #[test]
    fn quantiles_interpolate() {
        let s: Vec<f64> = (0..21).map(|i| i as f64).collect();
        assert_eq!(quantile(&s, 0.05), 1.0);
        assert_eq!(quantile(&s, 0.5), 10.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
        assert_eq!(quantile(&[3.0], 0.05), 3.0);
    }

    #[test]
    fn nodata_excluded_and_fraction() {
        let a = grid(|_, _| 1.0);
        let mut b = grid(|_, _| 0.5);
        b.values[0] = DEFAULT_NODATA;
        b.values[1] = DEFAULT_NODATA;
        let (d, r) = diff_dem(&a, &b, 0.2).unwrap();
        assert_eq!(d.values[0], DEFAULT_NODATA);
        assert_eq!(r.valid_cell_fraction, 78.0 / 80.0);
        assert_eq!(r.mean_delta_m, -0.5);
    }

    #[test]
    fn rise_reports_no_drop() {
        let a = grid(|_, _| 1.0);
        let b = grid(|_, _| 1.3);
        let (_, r) = diff_dem(&a, &b, 0.2).unwrap();
        assert_eq!(r.max_drop_m, 0.0);
        assert_eq!(r.area_exceeding_m2, 0.0);
    }

    #[test]
    fn differing_geometry_is_resampled() {
        let a = grid(|e, _| e);
        let b = DemGrid::from_fn(-2.0, -2.0, 0.5, 40, 40, |e, _| e - 0.25).unwrap();
        let (_, r) = diff_dem(&a, &b, 0.1).unwrap();
        assert!((r.mean_delta_m + 0.25).abs() < 1e-9);
        let far = DemGrid::from_fn(100.0, 100.0, 1.0, 3, 3, |_, _| 0.0).unwrap();
        assert!(matches!(
            diff_dem(&a, &far, 0.1),
            Err(AnalyticsError::NoOverlap)
        ));
    }
}
