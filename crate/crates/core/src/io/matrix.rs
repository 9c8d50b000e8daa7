use crate::error::{Error, Result};
use crate::io::{csv_error, csv_writer, finish, format_f64, json_error, parse_f64};
use crate::kinematics::Matrix;

fn from_rows(rows: Vec<Vec<f64>>) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Parse("matrix is empty".into()));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("matrix rows differ in length".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Parse("matrix entries must be finite".into()));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Parses a row-major nested JSON array such as `[[1, 0], [0, 1]]`.
pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(json_error)?;
    from_rows(rows)
}

pub fn matrix_to_json(m: &Matrix) -> Result<String> {
    serde_json::to_string(&to_rows(m)).map_err(json_error)
}

/// One matrix row per line, comma separated, no header.
pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        rows.push(record.iter().map(parse_f64).collect::<Result<Vec<f64>>>()?);
    }
    from_rows(rows)
}

pub fn matrix_to_csv(m: &Matrix) -> Result<String> {
    let mut w = csv_writer();
    for row in m.row_iter() {
        w.write_record(row.iter().map(|v| format_f64(*v))).map_err(csv_error)?;
    }
    finish(w)
}
