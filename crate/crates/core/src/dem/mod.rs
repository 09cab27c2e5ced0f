//! Regular elevation grids built from point clouds.
//!
//! Grid conventions, used everywhere in the crate:
//! * `origin_east`/`origin_north` is the lower-left corner of the grid.
//! * `values` are row-major with row 0 at the **south** edge; ASCII grid
//!   files are written north-to-south and flipped on I/O.
//! * Cell `(col, row)` covers `[x0 + col·c, x0 + (col+1)·c) × [y0 + row·c, y0 + (row+1)·c)`;
//!   its value is read as the elevation at the cell centre.
//! * Missing cells hold exactly the `nodata` sentinel.

mod asc;
mod cloud;
mod hillshade;
mod pipeline;
mod raster;
mod sample;

pub use asc::{
    read_asc, read_asc_str, write_asc, write_asc_string, write_asc_string_with, write_asc_with,
};
pub use cloud::{parse_xyz, read_xyz, write_xyz, CloudCrs, PointCloud, RawCloud};
pub use hillshade::{render_hillshade, HillshadeImage};
pub use pipeline::{build_dem, BuildStats, DemBuildParams};
pub use raster::{fill_voids, rasterize, Aggregation};
pub use sample::{resample_onto, sample_bilinear};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_NODATA: f64 = -9999.0;

#[derive(Debug, Error)]
pub enum DemError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("grids do not overlap")]
    NoOverlap,
    #[error("grid is {cols}x{rows}; hillshade needs at least 3x3")]
    TooSmall { cols: usize, rows: usize },
    #[error(transparent)]
    Geodesy(#[from] crate::geodesy::GeodesyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("png encoding: {0}")]
    Png(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemGrid {
    pub origin_east: f64,
    pub origin_north: f64,
    pub cell_size: f64,
    pub n_cols: usize,
    pub n_rows: usize,
    pub values: Vec<f64>,
    pub nodata: f64,
    #[serde(default)]
    pub epoch_id: String,
    #[serde(default)]
    pub captured_at: Option<DateTime<Utc>>,
}

impl DemGrid {
    pub fn new(
        origin_east: f64,
        origin_north: f64,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        values: Vec<f64>,
        nodata: f64,
    ) -> Result<Self, DemError> {
        let g = DemGrid {
            origin_east,
            origin_north,
            cell_size,
            n_cols,
            n_rows,
            values,
            nodata,
            epoch_id: String::new(),
            captured_at: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid of `nodata` with the given geometry.
    pub fn empty(
        origin_east: f64,
        origin_north: f64,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        nodata: f64,
    ) -> Result<Self, DemError> {
        Self::new(
            origin_east,
            origin_north,
            cell_size,
            n_cols,
            n_rows,
            vec![nodata; n_cols * n_rows],
            nodata,
        )
    }

    /// Grid whose cell centres take `f(east, north)`.
    pub fn from_fn(
        origin_east: f64,
        origin_north: f64,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, DemError> {
        let mut g = Self::empty(
            origin_east,
            origin_north,
            cell_size,
            n_cols,
            n_rows,
            DEFAULT_NODATA,
        )?;
        for row in 0..n_rows {
            for col in 0..n_cols {
                let (e, n) = g.cell_center(col, row);
                g.values[row * n_cols + col] = f(e, n);
            }
        }
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), DemError> {
        let bad = |m: String| Err(DemError::InvalidGrid(m));
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return bad(format!(
                "cell_size must be positive, got {}",
                self.cell_size
            ));
        }
        if self.n_cols == 0 || self.n_rows == 0 {
            return bad("grid must have at least one row and column".into());
        }
        if !(self.origin_east.is_finite()
            && self.origin_north.is_finite()
            && self.nodata.is_finite())
        {
            return bad("origin and nodata must be finite".into());
        }
        if self.values.len() != self.n_cols * self.n_rows {
            return bad(format!(
                "{} values for a {}x{} grid",
                self.values.len(),
                self.n_cols,
                self.n_rows
            ));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return bad(format!("non-finite value at index {i}"));
        }
        Ok(())
    }

    pub fn with_epoch(
        mut self,
        epoch_id: impl Into<String>,
        captured_at: Option<DateTime<Utc>>,
    ) -> Self {
        self.epoch_id = epoch_id.into();
        self.captured_at = captured_at;
        self
    }

    #[inline]
    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.n_cols + col
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> Option<f64> {
        let v = self.values[self.index(col, row)];
        (v != self.nodata).then_some(v)
    }

    #[inline]
    pub fn is_valid(&self, col: usize, row: usize) -> bool {
        self.values[self.index(col, row)] != self.nodata
    }

    pub fn cell_center(&self, col: usize, row: usize) -> (f64, f64) {
        (
            self.origin_east + (col as f64 + 0.5) * self.cell_size,
            self.origin_north + (row as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn max_east(&self) -> f64 {
        self.origin_east + self.n_cols as f64 * self.cell_size
    }

    pub fn max_north(&self) -> f64 {
        self.origin_north + self.n_rows as f64 * self.cell_size
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_size * self.cell_size
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != self.nodata).count()
    }

    pub fn valid_fraction(&self) -> f64 {
        self.valid_count() as f64 / self.values.len() as f64
    }

    /// True when origin, cell size and dimensions match exactly.
    pub fn same_geometry(&self, other: &DemGrid) -> bool {
        self.origin_east == other.origin_east
            && self.origin_north == other.origin_north
            && self.cell_size == other.cell_size
            && self.n_cols == other.n_cols
            && self.n_rows == other.n_rows
    }

    pub fn overlaps(&self, other: &DemGrid) -> bool {
        self.origin_east < other.max_east()
            && other.origin_east < self.max_east()
            && self.origin_north < other.max_north()
            && other.origin_north < self.max_north()
    }

    /// Min, max and mean of the valid cells.
    pub fn stats(&self) -> Option<GridStats> {
        let mut n = 0usize;
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for &v in self.values.iter().filter(|&&v| v != self.nodata) {
            n += 1;
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        (n > 0).then(|| GridStats {
            min: lo,
            max: hi,
            mean: sum / n as f64,
            valid_cells: n,
            total_cells: self.values.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct GridStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub valid_cells: usize,
    pub total_cells: usize,
}
