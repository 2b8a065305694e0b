//! Trajectory diagnostics as CSV, floats with 17 significant digits.

use std::io::Write;
use std::path::Path;

use nambu_core::dynamics::DiagnosticsTable;

use crate::IoError;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table<W: Write>(out: W, table: &DiagnosticsTable) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format_float(*x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_table(path: &Path, table: &DiagnosticsTable) -> Result<(), IoError> {
    let file = std::fs::File::create(path).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })?;
    write_table(std::io::BufWriter::new(file), table).map_err(|source| IoError::Csv {
        path: path.into(),
        source,
    })
}
