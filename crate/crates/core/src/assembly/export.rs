use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Writes `row col value` per stored entry, zero based, rows ascending.
pub fn write_coordinate_to<T: Real>(out: &mut impl Write, matrix: &CsrMatrix<T>) -> Result<()> {
    for i in 0..matrix.n {
        for (j, v) in matrix.row(i) {
            writeln!(out, "{i} {j} {:.16e}", v.to_f64_lossy())?;
        }
    }
    Ok(())
}

pub fn write_coordinate<T: Real>(path: &Path, matrix: &CsrMatrix<T>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_coordinate_to(&mut out, matrix)?;
    out.flush()?;
    Ok(())
}
