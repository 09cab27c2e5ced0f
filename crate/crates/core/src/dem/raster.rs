use super::{DemError, DemGrid, PointCloud, DEFAULT_NODATA};
use serde::{Deserialize, Serialize};

/// How the elevations of points sharing a cell are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Mean,
    Max,
    Min,
}

impl std::str::FromStr for Aggregation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Aggregation::Mean),
            "max" => Ok(Aggregation::Max),
            "min" => Ok(Aggregation::Min),
            _ => Err(format!("unknown aggregation `{s}` (mean|max|min)")),
        }
    }
}

const MAX_CELLS: usize = 400_000_000;

/// Bins a cloud onto a grid aligned to multiples of `cell_size`.
///
/// The grid spans the cloud's bounding box expanded to whole cells. A point
/// on a shared cell edge lands in the higher-index cell. Cells without
/// points are `nodata`.
pub fn rasterize(
    cloud: &PointCloud,
    cell_size: f64,
    agg: Aggregation,
) -> Result<DemGrid, DemError> {
    if !(cell_size.is_finite() && cell_size > 0.0) {
        return Err(DemError::InvalidGrid(format!(
            "cell_size must be positive, got {cell_size}"
        )));
    }
    if cloud.points.is_empty() {
        return Err(DemError::EmptyCloud);
    }
    let lattice = |x: f64| (x / cell_size).floor() as i64;
    let (mut c0, mut c1, mut r0, mut r1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for p in &cloud.points {
        let (c, r) = (lattice(p.east), lattice(p.north));
        c0 = c0.min(c);
        c1 = c1.max(c);
        r0 = r0.min(r);
        r1 = r1.max(r);
    }
    let n_cols = (c1 - c0 + 1) as usize;
    let n_rows = (r1 - r0 + 1) as usize;
    if n_cols.saturating_mul(n_rows) > MAX_CELLS {
        return Err(DemError::InvalidGrid(format!(
            "{n_cols}x{n_rows} cells exceeds the {MAX_CELLS} cell limit"
        )));
    }

    let mut acc = vec![0.0f64; n_cols * n_rows];
    let mut count = vec![0u32; n_cols * n_rows];
    for p in &cloud.points {
        let col = (lattice(p.east) - c0) as usize;
        let row = (lattice(p.north) - r0) as usize;
        let i = row * n_cols + col;
        let z = p.up;
        acc[i] = match (count[i], agg) {
            (0, _) => z,
            (_, Aggregation::Mean) => acc[i] + z,
            (_, Aggregation::Max) => acc[i].max(z),
            (_, Aggregation::Min) => acc[i].min(z),
        };
        count[i] += 1;
    }
    let values = acc
        .iter()
        .zip(&count)
        .map(|(&a, &n)| match (n, agg) {
            (0, _) => DEFAULT_NODATA,
            (n, Aggregation::Mean) => a / n as f64,
            _ => a,
        })
        .collect();
    DemGrid::new(
        c0 as f64 * cell_size,
        r0 as f64 * cell_size,
        cell_size,
        n_cols,
        n_rows,
        values,
        DEFAULT_NODATA,
    )
}

/// Inverse-distance-squared filling of `nodata` cells.
///
/// A missing cell is filled when at least `min_neighbors` valid cells lie
/// within `radius` metres (centre to centre). Reads only the input grid, so
/// newly filled cells never feed other fills. Valid cells are untouched.
pub fn fill_voids(grid: &DemGrid, radius: f64, min_neighbors: usize) -> Result<DemGrid, DemError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(DemError::InvalidGrid(format!(
            "fill radius must be positive, got {radius}"
        )));
    }
    let min_neighbors = min_neighbors.max(1);
    let c = grid.cell_size;
    let reach = (radius / c).floor() as i64;
    let mut offsets: Vec<(i64, i64, f64)> = Vec::new();
    for dr in -reach..=reach {
        for dc in -reach..=reach {
            if dr == 0 && dc == 0 {
                continue;
            }
            let d = c * ((dr * dr + dc * dc) as f64).sqrt();
            if d <= radius * (1.0 + 1e-12) {
                offsets.push((dc, dr, 1.0 / (d * d)));
            }
        }
    }

    let mut out = grid.clone();
    let (nc, nr) = (grid.n_cols as i64, grid.n_rows as i64);
    let mut neigh: Vec<(f64, f64)> = Vec::with_capacity(offsets.len());
    for row in 0..nr {
        for col in 0..nc {
            if grid.is_valid(col as usize, row as usize) {
                continue;
            }
            neigh.clear();
            for &(dc, dr, w) in &offsets {
                let (cc, rr) = (col + dc, row + dr);
                if cc < 0 || rr < 0 || cc >= nc || rr >= nr {
                    continue;
                }
                if let Some(z) = grid.get(cc as usize, rr as usize) {
                    neigh.push((z, w));
                }
            }
            if neigh.len() < min_neighbors {
                continue;
            }
            // weighted mean about the first neighbour keeps constant fields exact
            let z0 = neigh[0].0;
            let (mut num, mut den) = (0.0, 0.0);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &(z, w) in &neigh {
                num += w * (z - z0);
                den += w;
                lo = lo.min(z);
                hi = hi.max(z);
            }
            let i = grid.index(col as usize, row as usize);
            out.values[i] = (z0 + num / den).clamp(lo, hi);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesy::EnuPoint;

    fn cloud(pts: &[(f64, f64, f64)]) -> PointCloud {
        PointCloud::new(
            pts.iter()
                .map(|&(e, n, u)| EnuPoint::new(e, n, u))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mean_of_points_in_one_cell() {
        let c = cloud(&[
            (0.1, 0.1, 1.0),
            (0.2, 0.3, 2.0),
            (0.5, 0.5, 3.0),
            (0.9, 0.9, 4.0),
        ]);
        let g = rasterize(&c, 1.0, Aggregation::Mean).unwrap();
        assert_eq!((g.n_cols, g.n_rows), (1, 1));
        assert_eq!(g.values[0], 2.5);
        assert_eq!(rasterize(&c, 1.0, Aggregation::Max).unwrap().values[0], 4.0);
        assert_eq!(rasterize(&c, 1.0, Aggregation::Min).unwrap().values[0], 1.0);
    }

    #[test]
    fn edge_point_goes_to_higher_cell() {
        let c = cloud(&[(0.5, 0.5, 1.0), (1.0, 0.5, 7.0)]);
        let g = rasterize(&c, 1.0, Aggregation::Mean).unwrap();
        assert_eq!((g.n_cols, g.n_rows), (2, 1));
        assert_eq!(g.values, vec![1.0, 7.0]);
        assert_eq!(g.origin_east, 0.0);
    }

    #[test]
    fn empty_cells_are_nodata() {
        let c = cloud(&[(0.5, 0.5, 1.0), (2.5, 0.5, 1.0)]);
        let g = rasterize(&c, 1.0, Aggregation::Mean).unwrap();
        assert_eq!(g.values[1], DEFAULT_NODATA);
        assert_eq!(g.valid_count(), 2);
    }

    #[test]
    fn fill_noop_without_voids() {
        let g = DemGrid::from_fn(0.0, 0.0, 1.0, 4, 4, |e, n| e + n).unwrap();
        assert_eq!(fill_voids(&g, 3.0, 3).unwrap(), g);
    }

    #[test]
    fn fill_constant_surround() {
        let mut g = DemGrid::from_fn(0.0, 0.0, 1.0, 3, 3, |_, _| 5.0).unwrap();
        g.values[4] = DEFAULT_NODATA;
        let f = fill_voids(&g, 1.5, 3).unwrap();
        assert_eq!(f.values[4], 5.0);
    }

    #[test]
    fn fill_idw_hand_case() {
        // row: [4, void, void, 6]; target col 1 sees 4 at d=1 and 6 at d=2
        let nd = DEFAULT_NODATA;
        let g = DemGrid::new(0.0, 0.0, 1.0, 4, 1, vec![4.0, nd, nd, 6.0], nd).unwrap();
        let f = fill_voids(&g, 2.0, 2).unwrap();
        assert!((f.values[1] - 4.4).abs() < 1e-9, "{}", f.values[1]);
        // col 2: 6 at d=1, 4 at d=2
        assert!((f.values[2] - 5.6).abs() < 1e-9);
        // min_neighbors not met
        assert_eq!(fill_voids(&g, 2.0, 3).unwrap().values[1], nd);
    }
}
