//! Strict CSV ingestion for sample matrices.

use std::path::Path;

use orthant_t2::hotelling::SampleMatrix;

use crate::CliError;

/// Read an `n × d` numeric matrix.
///
/// The first row is taken as a header when none of its cells parses as a
/// number. Every other cell must be a finite number; rows must have equal
/// length. Errors name the 1-based line and column.
pub fn read_sample(path: &Path) -> Result<SampleMatrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line());
        if idx == 0 && record.iter().all(|cell| cell.parse::<f64>().is_err()) {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let value = cell.parse::<f64>().ok().filter(|v| v.is_finite());
            match value {
                Some(v) => row.push(v),
                None => {
                    return Err(CliError::Cell {
                        row: line,
                        column: col + 1,
                        cell: cell.to_string(),
                    })
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    Ok(SampleMatrix::from_rows(&rows)?)
}
