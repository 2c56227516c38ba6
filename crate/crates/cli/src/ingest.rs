//! Raw point clouds from CSV or JSON files.

use std::path::Path;

use modelset::{IndexedPointSet, Region};
use serde::Deserialize;

use crate::config::{PointFormat, RegionConfig};
use crate::error::{CliError, Result};

pub struct Ingested {
    pub set: IndexedPointSet,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
struct JsonPoints {
    points: Vec<Vec<f64>>,
    #[serde(default)]
    region: Option<RegionConfig>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonInput {
    Bare(Vec<Vec<f64>>),
    Full(JsonPoints),
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_path_buf(), line, message: message.into() }
}

/// Reads a CSV file whose header names the coordinate columns `x[,y[,z]]`.
/// Other columns are ignored.
fn read_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::io(path, std::io::Error::other(e.to_string())),
            _ => parse_error(path, 1, e.to_string()),
        })?;
    let header = reader.headers().map_err(|e| parse_error(path, 1, e.to_string()))?.clone();
    let mut cols = Vec::new();
    for name in ["x", "y", "z"] {
        match header.iter().position(|h| h == name) {
            Some(i) => cols.push(i),
            None => break,
        }
    }
    if cols.is_empty() {
        return Err(parse_error(path, 1, "header must name the coordinates x[,y[,z]]"));
    }
    let mut points = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let p = cols
            .iter()
            .map(|&i| {
                let field = rec.get(i).unwrap_or("");
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_error(path, line, format!("`{field}` is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        points.push(p);
    }
    Ok(points)
}

fn read_json(path: &Path) -> Result<(Vec<Vec<f64>>, Option<RegionConfig>)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parsed: JsonInput = serde_json::from_str(&text).map_err(|e| parse_error(path, e.line(), e.to_string()))?;
    Ok(match parsed {
        JsonInput::Bare(p) => (p, None),
        JsonInput::Full(j) => (j.points, j.region),
    })
}

/// The smallest half-open box holding every point, widened slightly so the
/// largest coordinates are inside.
fn bounding_box(points: &[Vec<f64>], dim: usize) -> Region {
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for i in 0..dim {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    for i in 0..dim {
        let pad = 1e-9 * (hi[i] - lo[i]).abs().max(hi[i].abs()).max(1.0);
        hi[i] += pad;
        if hi[i] <= lo[i] {
            hi[i] = lo[i] + 1.0;
        }
    }
    Region::new(lo, hi).expect("bounding box is non-degenerate")
}

/// Loads a raw point set. The region comes from `region`, then from the
/// file (JSON only), and is otherwise the bounding box with a warning.
pub fn ingest(path: &Path, format: Option<PointFormat>, region: Option<&RegionConfig>) -> Result<Ingested> {
    let format = format
        .or_else(|| PointFormat::from_path(path))
        .ok_or_else(|| CliError::Config(format!("cannot tell the format of {}", path.display())))?;
    let (points, file_region) = match format {
        PointFormat::Csv => (read_csv(path)?, None),
        PointFormat::Json => read_json(path)?,
    };
    let dim = points.first().map_or(0, Vec::len);
    if dim == 0 || dim > 3 {
        return Err(parse_error(path, 1, format!("need 1 to 3 coordinates per point, found {dim}")));
    }
    if let Some(i) = points.iter().position(|p| p.len() != dim) {
        // data rows start on line 2 of a CSV file
        let line = if format == PointFormat::Csv { i + 2 } else { 0 };
        return Err(parse_error(path, line, format!("point {i} has {} coordinates, expected {dim}", points[i].len())));
    }
    let mut warnings = Vec::new();
    let region = match region.or(file_region.as_ref()) {
        Some(r) => r.to_region()?,
        None => {
            let r = bounding_box(&points, dim);
            warnings.push(format!(
                "no region given for {}; using the bounding box lo = {:?}, hi = {:?}",
                path.display(),
                r.lo,
                r.hi
            ));
            r
        }
    };
    let set = IndexedPointSet::from_raw(points, region)
        .map_err(|e| CliError::module(format!("ingesting {}", path.display()), e))?;
    Ok(Ingested { set, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounding_box_holds_extremes() {
        let pts = vec![vec![0.0, -2.0], vec![3.0, 5.0]];
        let r = bounding_box(&pts, 2);
        assert!(pts.iter().all(|p| r.contains(p)));
    }

    #[test]
    fn single_point_box_is_non_degenerate() {
        let r = bounding_box(&[vec![4.0]], 1);
        assert!(r.contains(&[4.0]));
    }
}
