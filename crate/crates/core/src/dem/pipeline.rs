use super::{fill_voids, rasterize, Aggregation, DemError, DemGrid, PointCloud};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(default)]
pub struct DemBuildParams {
    pub cell_size: f64,
    pub aggregation: Aggregation,
    /// Void-fill search radius in metres; `None` means three cells.
    pub fill_radius: Option<f64>,
    pub min_neighbors: usize,
    pub azimuth_deg: f64,
    pub sun_altitude_deg: f64,
}

impl Default for DemBuildParams {
    fn default() -> Self {
        DemBuildParams {
            cell_size: 0.25,
            aggregation: Aggregation::Mean,
            fill_radius: None,
            min_neighbors: 3,
            azimuth_deg: 315.0,
            sun_altitude_deg: 45.0,
        }
    }
}

impl DemBuildParams {
    pub fn fill_radius(&self) -> f64 {
        self.fill_radius.unwrap_or(3.0 * self.cell_size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct BuildStats {
    pub point_count: usize,
    pub rejected_points: usize,
    pub n_cols: usize,
    pub n_rows: usize,
    /// Before void filling.
    pub raw_valid_fraction: f64,
    pub filled_cells: usize,
    pub valid_cell_fraction: f64,
}

/// Rasterize then fill voids.
pub fn build_dem(
    cloud: &PointCloud,
    params: &DemBuildParams,
) -> Result<(DemGrid, BuildStats), DemError> {
    let raw = rasterize(cloud, params.cell_size, params.aggregation)?;
    let filled = fill_voids(&raw, params.fill_radius(), params.min_neighbors)?;
    let raw_valid = raw.valid_count();
    let stats = BuildStats {
        point_count: cloud.len(),
        rejected_points: cloud.rejected,
        n_cols: filled.n_cols,
        n_rows: filled.n_rows,
        raw_valid_fraction: raw_valid as f64 / raw.values.len() as f64,
        filled_cells: filled.valid_count() - raw_valid,
        valid_cell_fraction: filled.valid_fraction(),
    };
    Ok((filled, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesy::EnuPoint;

    #[test]
    fn fills_checkerboard_gaps() {
        let mut pts = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                if (i + j) % 2 == 0 {
                    pts.push(EnuPoint::new(i as f64 + 0.5, j as f64 + 0.5, 2.0));
                }
            }
        }
        let cloud = PointCloud::new(pts).unwrap();
        let p = DemBuildParams {
            cell_size: 1.0,
            ..Default::default()
        };
        let (g, s) = build_dem(&cloud, &p).unwrap();
        assert_eq!(s.point_count, 32);
        assert_eq!(s.raw_valid_fraction, 0.5);
        assert_eq!(s.filled_cells, 32);
        assert!(g.values.iter().all(|&v| v == 2.0));
    }
}
