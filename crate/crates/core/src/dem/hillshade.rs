use super::{DemError, DemGrid};
use std::path::Path;

/// 8-bit shaded relief with the geometry of its source grid.
/// Row 0 is the southern edge, as in [`DemGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct HillshadeImage {
    pub origin_east: f64,
    pub origin_north: f64,
    pub cell_size: f64,
    pub n_cols: usize,
    pub n_rows: usize,
    pub values: Vec<u8>,
}

impl HillshadeImage {
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.values[row * self.n_cols + col]
    }

    /// Grayscale PNG, north at the top.
    pub fn to_png(&self) -> Result<Vec<u8>, DemError> {
        let mut buf = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut buf, self.n_cols as u32, self.n_rows as u32);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc
                .write_header()
                .map_err(|e| DemError::Png(e.to_string()))?;
            let mut data = Vec::with_capacity(self.values.len());
            for row in (0..self.n_rows).rev() {
                data.extend_from_slice(&self.values[row * self.n_cols..(row + 1) * self.n_cols]);
            }
            w.write_image_data(&data)
                .map_err(|e| DemError::Png(e.to_string()))?;
        }
        Ok(buf)
    }

    pub fn write_png(&self, path: impl AsRef<Path>) -> Result<(), DemError> {
        std::fs::write(path, self.to_png()?)?;
        Ok(())
    }
}

/// Horn-gradient hillshade. `azimuth` is the compass bearing the light
/// comes from, `sun_alt` its elevation above the horizon, both in degrees.
/// Border cells and cells touching `nodata` are 0.
pub fn render_hillshade(
    grid: &DemGrid,
    azimuth: f64,
    sun_alt: f64,
) -> Result<HillshadeImage, DemError> {
    if grid.n_cols < 3 || grid.n_rows < 3 {
        return Err(DemError::TooSmall {
            cols: grid.n_cols,
            rows: grid.n_rows,
        });
    }
    let zenith = (90.0 - sun_alt).to_radians();
    let az = azimuth.to_radians();
    let (cos_z, sin_z) = (zenith.cos(), zenith.sin());
    let eight_c = 8.0 * grid.cell_size;
    let mut values = vec![0u8; grid.n_cols * grid.n_rows];

    for row in 1..grid.n_rows - 1 {
        'cell: for col in 1..grid.n_cols - 1 {
            // w[dr][dc], dr = 0 south .. 2 north, dc = 0 west .. 2 east
            let mut w = [[0.0f64; 3]; 3];
            for (dr, wr) in w.iter_mut().enumerate() {
                for (dc, z) in wr.iter_mut().enumerate() {
                    match grid.get(col + dc - 1, row + dr - 1) {
                        Some(v) => *z = v,
                        None => continue 'cell,
                    }
                }
            }
            let dzdx = ((w[2][2] + 2.0 * w[1][2] + w[0][2]) - (w[2][0] + 2.0 * w[1][0] + w[0][0]))
                / eight_c;
            let dzdy = ((w[2][0] + 2.0 * w[2][1] + w[2][2]) - (w[0][0] + 2.0 * w[0][1] + w[0][2]))
                / eight_c;
            let slope = dzdx.hypot(dzdy).atan();
            // compass bearing of the downslope direction
            let aspect = (-dzdx).atan2(-dzdy);
            let shade = cos_z * slope.cos() + sin_z * slope.sin() * (az - aspect).cos();
            values[row * grid.n_cols + col] = (255.0 * shade.max(0.0)).round().min(255.0) as u8;
        }
    }
    Ok(HillshadeImage {
        origin_east: grid.origin_east,
        origin_north: grid.origin_north,
        cell_size: grid.cell_size,
        n_cols: grid.n_cols,
        n_rows: grid.n_rows,
        values,
    })
}
