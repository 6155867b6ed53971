//! CSV ingestion of data matrices, grouped observations and manifests.
//!
//! All readers accept `#` comment lines and surrounding whitespace; every
//! error names the offending file and, when known, the line.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{CliError, CliResult};

fn reader(path: &Path, has_header: bool) -> CliResult<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(has_header)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => CliError::data(path, None, format!("{other:?}")),
        })
}

fn records(path: &Path, has_header: bool) -> CliResult<Vec<(u64, csv::StringRecord)>> {
    let mut rdr = reader(path, has_header)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line());
            CliError::data(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec));
    }
    if out.is_empty() {
        return Err(CliError::data(path, None, "no data rows"));
    }
    Ok(out)
}

fn parse_cell(path: &Path, line: u64, col: usize, cell: &str) -> CliResult<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::data(path, Some(line), format!("column {}: '{cell}' is not a finite number", col + 1))),
    }
}

fn check_width(path: &Path, line: u64, expected: usize, found: usize) -> CliResult<()> {
    if found != expected {
        return Err(CliError::data(path, Some(line), format!("ragged row: expected {expected} columns, found {found}")));
    }
    Ok(())
}

/// Numeric matrix, one observation per row.
pub fn read_matrix(path: &Path, has_header: bool) -> CliResult<DMatrix<f64>> {
    let recs = records(path, has_header)?;
    let width = recs[0].1.len();
    let mut data = Vec::with_capacity(recs.len() * width);
    for (line, rec) in &recs {
        check_width(path, *line, width, rec.len())?;
        for (c, cell) in rec.iter().enumerate() {
            data.push(parse_cell(path, *line, c, cell)?);
        }
    }
    Ok(DMatrix::from_row_slice(recs.len(), width, &data))
}

/// Observations whose first column is a group label. Groups keep their
/// order of first appearance.
pub fn read_grouped(path: &Path, has_header: bool) -> CliResult<Vec<(String, DMatrix<f64>)>> {
    let recs = records(path, has_header)?;
    let width = recs[0].1.len();
    if width < 2 {
        return Err(CliError::data(path, Some(recs[0].0), "need a group column and at least one variable"));
    }
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for (line, rec) in &recs {
        check_width(path, *line, width, rec.len())?;
        let label = &rec[0];
        let idx = match groups.iter().position(|g| g.0 == label) {
            Some(i) => i,
            None => {
                groups.push((label.to_string(), Vec::new()));
                groups.len() - 1
            }
        };
        for (c, cell) in rec.iter().enumerate().skip(1) {
            let v = parse_cell(path, *line, c, cell)?;
            groups[idx].1.push(v);
        }
    }
    let p = width - 1;
    Ok(groups
        .into_iter()
        .map(|(label, v)| {
            let rows = v.len() / p;
            (label, DMatrix::from_row_slice(rows, p, &v))
        })
        .collect())
}

/// Pairs of sample files listed two per row; relative paths resolve
/// against the manifest's directory. A header row is detected when its
/// entries are literally `sample1,sample2`.
pub fn read_manifest(path: &Path) -> CliResult<Vec<(PathBuf, PathBuf)>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let recs = records(path, false)?;
    let mut pairs = Vec::new();
    for (i, (line, rec)) in recs.iter().enumerate() {
        if rec.len() != 2 {
            return Err(CliError::data(path, Some(*line), format!("expected 2 file names, found {}", rec.len())));
        }
        if i == 0 && &rec[0] == "sample1" && &rec[1] == "sample2" {
            continue;
        }
        pairs.push((base.join(&rec[0]), base.join(&rec[1])));
    }
    if pairs.is_empty() {
        return Err(CliError::data(path, None, "manifest lists no pairs"));
    }
    Ok(pairs)
}
