use super::{DemError, DemGrid};

/// Bilinear elevation at `(east, north)` from the four surrounding cell
/// centres. With one to three of those corners missing, the nearest valid
/// corner is returned. `None` when all four are missing or the query lies
/// outside the grid extent. Between the outermost cell centres and the grid
/// edge the edge values are held constant.
pub fn sample_bilinear(grid: &DemGrid, east: f64, north: f64) -> Option<f64> {
    if !(east.is_finite() && north.is_finite()) {
        return None;
    }
    if east < grid.origin_east
        || east > grid.max_east()
        || north < grid.origin_north
        || north > grid.max_north()
    {
        return None;
    }
    let c = grid.cell_size;
    let fx = ((east - grid.origin_east) / c - 0.5).clamp(0.0, (grid.n_cols - 1) as f64);
    let fy = ((north - grid.origin_north) / c - 0.5).clamp(0.0, (grid.n_rows - 1) as f64);
    let i0 = (fx.floor() as usize).min(grid.n_cols - 1);
    let j0 = (fy.floor() as usize).min(grid.n_rows - 1);
    let i1 = (i0 + 1).min(grid.n_cols - 1);
    let j1 = (j0 + 1).min(grid.n_rows - 1);
    let tx = fx - i0 as f64;
    let ty = fy - j0 as f64;

    let corners = [
        (grid.get(i0, j0), 0.0, 0.0),
        (grid.get(i1, j0), 1.0, 0.0),
        (grid.get(i0, j1), 0.0, 1.0),
        (grid.get(i1, j1), 1.0, 1.0),
    ];
    if let [(Some(v00), ..), (Some(v10), ..), (Some(v01), ..), (Some(v11), ..)] = corners {
        let south = v00 * (1.0 - tx) + v10 * tx;
        let north_row = v01 * (1.0 - tx) + v11 * tx;
        return Some(south * (1.0 - ty) + north_row * ty);
    }
    let mut best: Option<(f64, f64)> = None;
    for (v, cx, cy) in corners {
        if let Some(v) = v {
            let d = (tx - cx).powi(2) + (ty - cy).powi(2);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
    }
    best.map(|(_, v)| v)
}

/// Re-grids `source` onto the geometry of `target` by bilinear sampling at
/// the target cell centres. Keeps the source's nodata and epoch metadata.
pub fn resample_onto(source: &DemGrid, target: &DemGrid) -> Result<DemGrid, DemError> {
    if !source.overlaps(target) {
        return Err(DemError::NoOverlap);
    }
    let mut values = Vec::with_capacity(target.n_cols * target.n_rows);
    for row in 0..target.n_rows {
        for col in 0..target.n_cols {
            let (e, n) = target.cell_center(col, row);
            values.push(sample_bilinear(source, e, n).unwrap_or(source.nodata));
        }
    }
    Ok(DemGrid {
        origin_east: target.origin_east,
        origin_north: target.origin_north,
        cell_size: target.cell_size,
        n_cols: target.n_cols,
        n_rows: target.n_rows,
        values,
        nodata: source.nodata,
        epoch_id: source.epoch_id.clone(),
        captured_at: source.captured_at,
    })
}
