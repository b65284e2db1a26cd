//! Columnar text format for sampled functions.
//!
//! The first line is a JSON header with at least `dim`, `N` and `L`. Each
//! following line holds the coordinates of one grid point followed by the real
//! and imaginary parts, in row-major order with 17 significant digits. Position
//! files use `q` coordinates and spectral files use `k` coordinates, with the
//! header field `domain` telling them apart.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fourier::SpectralFunction;
use crate::grid::{GridSpec, Wavefunction};

/// Header fields shared by all sampled-function files.
pub fn grid_header(grid: &GridSpec, domain: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("dim".into(), json!(grid.dim()));
    m.insert("N".into(), json!(grid.points_per_axis()));
    m.insert("L".into(), json!(grid.box_length()));
    m.insert("domain".into(), json!(domain));
    m
}

fn write_rows(
    header: Map<String, Value>,
    len: usize,
    dim: usize,
    coord: impl Fn(usize) -> [f64; 3],
    values: &[Complex64],
) -> String {
    let mut out = Value::Object(header).to_string();
    out.push('\n');
    for (i, v) in values.iter().enumerate().take(len) {
        let c = coord(i);
        for x in &c[..dim] {
            let _ = write!(out, "{x:.16e} ");
        }
        let _ = writeln!(out, "{:.16e} {:.16e}", v.re, v.im);
    }
    out
}

/// Serialize `psi`, merging `extra` into the header.
pub fn write_wavefunction(psi: &Wavefunction, extra: Option<&Map<String, Value>>) -> String {
    let grid = *psi.grid();
    let mut header = grid_header(&grid, "position");
    if let Some(e) = extra {
        header.extend(e.clone());
    }
    write_rows(header, grid.len(), grid.dim(), |i| grid.coordinate(i), psi.values())
}

/// Serialize spectral samples with wavevector coordinates.
pub fn write_spectral(f: &SpectralFunction, extra: Option<&Map<String, Value>>) -> String {
    let grid = *f.grid();
    let mut header = grid_header(&grid, "wavevector");
    if let Some(e) = extra {
        header.extend(e.clone());
    }
    write_rows(header, grid.len(), grid.dim(), |i| f.wavevector(i), f.values())
}

/// Parsed file: grid, samples and the full header.
pub struct ParsedSamples {
    pub grid: GridSpec,
    pub domain: String,
    pub header: Map<String, Value>,
    pub values: Vec<Complex64>,
}

fn header_usize(h: &Map<String, Value>, key: &str) -> Result<usize> {
    h.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::Parse(format!("header field `{key}` missing or not an integer")))
}

/// Parse either kind of file, checking every coordinate against the grid.
pub fn read_samples(text: &str) -> Result<ParsedSamples> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let header: Map<String, Value> = match serde_json::from_str(first)? {
        Value::Object(m) => m,
        _ => return Err(Error::Parse("header is not a JSON object".into())),
    };
    let dim = header_usize(&header, "dim")?;
    let n = header_usize(&header, "N")?;
    let l = header
        .get("L")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse("header field `L` missing".into()))?;
    let grid = GridSpec::new(dim, n, l)?;
    let domain = header.get("domain").and_then(Value::as_str).unwrap_or("position").to_string();
    let spectral = match domain.as_str() {
        "position" => false,
        "wavevector" => true,
        other => return Err(Error::Parse(format!("unknown domain `{other}`"))),
    };
    let tol = 1e-9 * if spectral { grid.max_wavevector() } else { l };
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines.enumerate() {
        if i >= grid.len() {
            return Err(Error::Parse(format!("more than {} data rows", grid.len())));
        }
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", i + 1))))
            .collect::<Result<_>>()?;
        if cols.len() != dim + 2 {
            return Err(Error::Parse(format!("row {}: expected {} columns, got {}", i + 1, dim + 2, cols.len())));
        }
        let expect = if spectral { crate::fourier::wavevector_of(&grid, i) } else { grid.coordinate(i) };
        if cols[..dim].iter().zip(&expect).any(|(a, b)| (a - b).abs() > tol) {
            return Err(Error::Parse(format!("row {}: coordinates do not match the grid", i + 1)));
        }
        values.push(Complex64::new(cols[dim], cols[dim + 1]));
    }
    if values.len() != grid.len() {
        return Err(Error::Parse(format!("expected {} data rows, got {}", grid.len(), values.len())));
    }
    Ok(ParsedSamples { grid, domain, header, values })
}

pub fn read_wavefunction(text: &str) -> Result<Wavefunction> {
    let parsed = read_samples(text)?;
    if parsed.domain != "position" {
        return Err(Error::Parse("expected a position-domain file".into()));
    }
    Wavefunction::new(parsed.grid, parsed.values)
}

pub fn read_spectral(text: &str) -> Result<SpectralFunction> {
    let parsed = read_samples(text)?;
    if parsed.domain != "wavevector" {
        return Err(Error::Parse("expected a wavevector-domain file".into()));
    }
    SpectralFunction::new(parsed.grid, parsed.values)
}
