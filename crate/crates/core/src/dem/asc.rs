//! ESRI ASCII grid (`.asc`) reading and writing.
//!
//! Written files use `xllcorner`/`yllcorner`, shortest round-trip header
//! numbers, three-decimal cell values (or shortest round-trip values with
//! [`write_asc_string_with`]), and the literal NODATA value for missing
//! cells. Rows run north to south. The reader also accepts
//! `xllcenter`/`yllcenter` headers but insists on one grid row per line.

use super::{DemError, DemGrid, DEFAULT_NODATA};
use std::fmt::Write as _;
use std::path::Path;

pub fn write_asc_string(grid: &DemGrid) -> String {
    write_asc_string_with(grid, Some(3))
}

/// `decimals: None` writes every value in shortest round-trip form, so
/// reading the file back reproduces the grid bit for bit.
pub fn write_asc_string_with(grid: &DemGrid, decimals: Option<usize>) -> String {
    let mut out = String::with_capacity(64 + grid.values.len() * 9);
    let _ = writeln!(out, "ncols {}", grid.n_cols);
    let _ = writeln!(out, "nrows {}", grid.n_rows);
    let _ = writeln!(out, "xllcorner {}", grid.origin_east);
    let _ = writeln!(out, "yllcorner {}", grid.origin_north);
    let _ = writeln!(out, "cellsize {}", grid.cell_size);
    let nodata = format!("{}", grid.nodata);
    let _ = writeln!(out, "NODATA_value {nodata}");
    for row in (0..grid.n_rows).rev() {
        for col in 0..grid.n_cols {
            if col > 0 {
                out.push(' ');
            }
            match grid.get(col, row) {
                Some(v) => {
                    let _ = match decimals {
                        Some(d) => write!(out, "{v:.d$}"),
                        None => write!(out, "{v}"),
                    };
                }
                None => out.push_str(&nodata),
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_asc(grid: &DemGrid, path: impl AsRef<Path>) -> Result<(), DemError> {
    std::fs::write(path, write_asc_string(grid))?;
    Ok(())
}

pub fn write_asc_with(
    grid: &DemGrid,
    path: impl AsRef<Path>,
    decimals: Option<usize>,
) -> Result<(), DemError> {
    std::fs::write(path, write_asc_string_with(grid, decimals))?;
    Ok(())
}

pub fn read_asc(path: impl AsRef<Path>) -> Result<DemGrid, DemError> {
    read_asc_str(&std::fs::read_to_string(path)?)
}

fn err(line: usize, message: impl Into<String>) -> DemError {
    DemError::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_asc_str(text: &str) -> Result<DemGrid, DemError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();

    let (mut ncols, mut nrows, mut cell) = (None, None, None);
    let (mut x, mut y, mut centered) = (None, None, false);
    let mut nodata = DEFAULT_NODATA;
    while let Some(&(lineno, line)) = lines.peek() {
        let mut toks = line.split_whitespace();
        let Some(key) = toks.next() else {
            lines.next();
            continue;
        };
        if !key.starts_with(|c: char| c.is_ascii_alphabetic()) {
            break;
        }
        lines.next();
        let val = toks
            .next()
            .ok_or_else(|| err(lineno, format!("header `{key}` has no value")))?;
        if toks.next().is_some() {
            return Err(err(lineno, format!("header `{key}` has extra tokens")));
        }
        let num = || {
            val.parse::<f64>()
                .map_err(|_| err(lineno, format!("header `{key}`: `{val}` is not a number")))
        };
        let count = || {
            val.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
                err(
                    lineno,
                    format!("header `{key}`: `{val}` is not a positive integer"),
                )
            })
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => ncols = Some(count()?),
            "nrows" => nrows = Some(count()?),
            "xllcorner" => x = Some(num()?),
            "yllcorner" => y = Some(num()?),
            "xllcenter" => {
                x = Some(num()?);
                centered = true;
            }
            "yllcenter" => {
                y = Some(num()?);
                centered = true;
            }
            "cellsize" => cell = Some(num()?),
            "nodata_value" => nodata = num()?,
            other => return Err(err(lineno, format!("unknown header key `{other}`"))),
        }
    }
    let header_end = lines
        .peek()
        .map(|&(l, _)| l)
        .unwrap_or(text.lines().count() + 1);
    let missing = |k: &str| err(header_end, format!("missing header `{k}`"));
    let n_cols = ncols.ok_or_else(|| missing("ncols"))?;
    let n_rows = nrows.ok_or_else(|| missing("nrows"))?;
    let cell_size = cell.ok_or_else(|| missing("cellsize"))?;
    let mut origin_east = x.ok_or_else(|| missing("xllcorner"))?;
    let mut origin_north = y.ok_or_else(|| missing("yllcorner"))?;
    if centered {
        origin_east -= cell_size / 2.0;
        origin_north -= cell_size / 2.0;
    }

    let mut values = vec![nodata; n_cols * n_rows];
    let mut row_from_top = 0;
    let mut last_line = header_end;
    for (lineno, line) in lines {
        last_line = lineno;
        if line.trim().is_empty() {
            continue;
        }
        if row_from_top == n_rows {
            return Err(err(lineno, format!("more than {n_rows} data rows")));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != n_cols {
            return Err(err(
                lineno,
                format!("expected {n_cols} values, found {}", toks.len()),
            ));
        }
        let row = n_rows - 1 - row_from_top;
        for (col, tok) in toks.iter().enumerate() {
            let v: f64 = tok
                .parse()
                .map_err(|_| err(lineno, format!("`{tok}` is not a number")))?;
            if !v.is_finite() {
                return Err(err(lineno, format!("non-finite value `{tok}`")));
            }
            values[row * n_cols + col] = v;
        }
        row_from_top += 1;
    }
    if row_from_top < n_rows {
        return Err(err(
            last_line + 1,
            format!("expected {n_rows} data rows, found {row_from_top}"),
        ));
    }
    DemGrid::new(
        origin_east,
        origin_north,
        cell_size,
        n_cols,
        n_rows,
        values,
        nodata,
    )
}
