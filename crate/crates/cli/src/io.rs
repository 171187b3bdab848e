//! CSV ingestion and report serialization.
//!
//! All files are comma separated with one header row. Variable and task
//! indices are 1-based in every output file.

use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::CliError;

/// Loads a numeric matrix. Row/column positions in error messages are
/// 1-based over data rows (the header is not counted).
pub fn read_matrix(path: &Path) -> Result<Array2<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let width = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{}: bad header: {e}", path.display())))?
        .len();
    let mut values: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| CliError::Data(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        if record.len() != width {
            return Err(CliError::Data(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                i + 1,
                record.len(),
                width
            )));
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Data(format!(
                    "{}: non-numeric value '{}' at row {}, column {}",
                    path.display(),
                    field,
                    i + 1,
                    j + 1
                ))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Array2::from_shape_vec((rows, width), values)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Splits a matrix into per-task response vectors.
pub fn columns_as_responses(y: &Array2<f64>) -> Vec<Array1<f64>> {
    (0..y.ncols()).map(|t| y.column(t).to_owned()).collect()
}

/// Centers each design column and scales it to unit sample standard
/// deviation. Fails on constant columns.
pub fn standardize_columns(x: &mut Array2<f64>) -> Result<(), CliError> {
    let n = x.nrows();
    if n < 2 {
        return Err(CliError::Data(
            "standardization needs at least 2 rows".into(),
        ));
    }
    for j in 0..x.ncols() {
        let mut col = x.column_mut(j);
        let mean = col.sum() / n as f64;
        col.mapv_inplace(|v| v - mean);
        let sd = (col.iter().map(|v| v * v).sum::<f64>() / (n - 1) as f64).sqrt();
        if sd == 0.0 {
            return Err(CliError::Data(format!(
                "column {} of the design has zero variance",
                j + 1
            )));
        }
        col.mapv_inplace(|v| v / sd);
    }
    Ok(())
}

/// Writes to `path`, or stdout when `path` is None.
pub fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => Ok(Box::new(std::fs::File::create(p).map_err(|e| {
            CliError::Data(format!("cannot write {}: {e}", p.display()))
        })?)),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}
