//! CSV ingestion of point clouds and distance matrices.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bgph_core::PseudoMetricSpace;

/// A parsed input file together with its raw bytes.
pub struct Input {
    pub space: PseudoMetricSpace,
    /// Coordinates when the file was a point cloud.
    pub points: Option<Vec<Vec<f64>>>,
    pub bytes: Vec<u8>,
}

fn parse_rows(bytes: &[u8], path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed CSV", path.display()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().with_context(|| {
                    format!("{}: row {}: {field:?} is not a number", path.display(), line + 1)
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.iter().any(|v| !v.is_finite()) {
            bail!("{}: row {}: values must be finite", path.display(), line + 1);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(rows)
}

/// Reads coordinates (one point per row) or, with `matrix`, a square distance matrix.
pub fn read_space(path: &Path, matrix: bool) -> Result<Input> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let rows = parse_rows(&bytes, path)?;
    let (space, points) = if matrix {
        let space = PseudoMetricSpace::from_matrix(&rows)
            .with_context(|| format!("{}: invalid distance matrix", path.display()))?;
        let violations = space.triangle_violations();
        if !violations.is_empty() {
            let (a, b, c) = violations[0];
            eprintln!(
                "warning: {}: {} triangle inequality violations, e.g. d({a},{c}) > d({a},{b}) + d({b},{c})",
                path.display(),
                violations.len()
            );
        }
        (space, None)
    } else {
        let space = PseudoMetricSpace::from_points(&rows)
            .with_context(|| format!("{}: invalid point cloud", path.display()))?;
        (space, Some(rows))
    };
    Ok(Input { space, points, bytes })
}
