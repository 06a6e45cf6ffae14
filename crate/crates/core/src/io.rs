//! CSV matrices with a header row. Values are written with 17 significant
//! digits so reading them back reproduces the exact `f64`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Full-precision text form of a float.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn read_matrix<R: Read>(reader: R) -> Result<(Vec<String>, Matrix)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::InvalidInput(format!("CSV header: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    let ncols = header.len();
    let mut data = Vec::new();
    let mut nrows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidInput(format!("CSV row {}: {e}", i + 1)))?;
        if rec.len() != ncols {
            return Err(Error::InvalidInput(format!(
                "CSV row {} has {} fields, header has {ncols}",
                i + 1,
                rec.len()
            )));
        }
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::InvalidInput(format!(
                    "CSV row {}, column {}: cannot parse {field:?}",
                    i + 1,
                    j + 1
                ))
            })?;
            data.push(v);
        }
        nrows += 1;
    }
    Ok((header, Matrix::from_row_slice(nrows, ncols, &data)))
}

pub fn read_matrix_file(path: &Path) -> Result<Matrix> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    read_matrix(file).map(|(_, m)| m)
}

pub fn write_matrix<W: Write>(writer: W, header: &[String], m: &Matrix) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let fail = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    };
    wtr.write_record(header).map_err(fail)?;
    for i in 0..m.nrows() {
        wtr.write_record((0..m.ncols()).map(|j| format_f64(m[(i, j)])))
            .map_err(fail)?;
    }
    wtr.flush().map_err(|e| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    })
}

/// Column names `prefix1, prefix2, …`.
pub fn default_header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn write_matrix_file(path: &Path, prefix: &str, m: &Matrix) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    write_matrix(BufWriter::new(file), &default_header(prefix, m.ncols()), m).map_err(|e| match e {
        Error::Io { message, .. } => io_err(path, message),
        other => other,
    })
}

/// Nonzero entries as `j,k,value` triplets (0-based indices).
pub fn write_triplets_file(path: &Path, m: &Matrix) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut out = String::from("j,k,value\n");
    for k in 0..m.ncols() {
        for j in 0..m.nrows() {
            if m[(j, k)] != 0.0 {
                out.push_str(&format!("{j},{k},{}\n", format_f64(m[(j, k)])));
            }
        }
    }
    w.write_all(out.as_bytes()).map_err(|e| io_err(path, e))
}

pub fn write_json_file<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_text_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}
