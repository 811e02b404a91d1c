//! CSV output with full round-trip precision.

use std::io::Write;

use crate::error::{Error, Result};

/// Formats `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of tables
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

pub(crate) fn io_error(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

/// Writes a header and numeric rows.
pub fn write_table<W, R>(out: W, headers: &[&str], rows: R) -> Result<()>
where
    W: Write,
    R: IntoIterator,
    R::Item: AsRef<[f64]>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(headers).map_err(io_error)?;
    for row in rows {
        w.write_record(row.as_ref().iter().map(|&x| num(x))).map_err(io_error)?;
    }
    w.flush().map_err(io_error)
}
