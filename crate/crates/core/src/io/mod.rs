//! Text formats for matrices, trajectories and spectra.
//!
//! CSV output writes every float with 17 significant digits in `.`-decimal scientific
//! notation. JSON output uses the shortest representation that parses back to the same
//! `f64`.

pub mod matrix;
pub mod spectrum;
pub mod trajectory;

pub use matrix::{matrix_from_csv, matrix_from_json, matrix_to_csv, matrix_to_json};
pub use spectrum::{eigenvectors_to_csv, GridSummary, SpectrumReport};
pub use trajectory::{trajectory_from_csv, trajectory_header, trajectory_to_csv, TrajectoryTable};

use crate::error::{Error, Result};

/// `v` with 17 significant digits, e.g. `1.0000000000000000e0`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_f64(field: &str) -> Result<f64> {
    let t = field.trim();
    t.parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {t:?}")))
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

pub(crate) fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("json: {e}"))
}

pub(crate) fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}
