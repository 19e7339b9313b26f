//! CSV reading and writing for [`Dataset`].
//!
//! Input accepts RFC 4180 quoting. Any cell that is an NA token, does not
//! parse as a number, or parses to a non-finite value becomes a missing
//! entry. Output is comma-delimited with a header row, `NA` for missing
//! entries and the shortest decimal that round-trips each value.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use copent_core::{Column, Dataset};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub na_tokens: BTreeSet<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            has_header: true,
            na_tokens: ["", "NA", "NaN", "nan", "."].into_iter().map(String::from).collect(),
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, options)
}

fn parse_cell(cell: &str, options: &CsvOptions) -> Option<f64> {
    let t = cell.trim();
    if options.na_tokens.contains(t) || options.na_tokens.contains(cell) {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn read_csv(reader: impl Read, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let mut names: Option<Vec<String>> = None;
    let mut cells: Vec<Vec<Option<f64>>> = Vec::new();
    let mut width = 0;
    if options.has_header {
        match records.next() {
            Some(rec) => {
                let rec = rec?;
                let header: Vec<String> = rec.iter().map(|s| s.trim().to_string()).collect();
                width = header.len();
                names = Some(header);
            }
            None => return Err(Error::NoRows),
        }
    }
    for rec in records {
        let rec = rec?;
        if names.is_none() && cells.is_empty() {
            width = rec.len();
        }
        if rec.len() != width {
            return Err(Error::RaggedRow {
                line: rec.position().map_or(0, |p| p.line()),
                expected: width,
                found: rec.len(),
            });
        }
        if cells.is_empty() {
            cells = vec![Vec::new(); width];
        }
        for (col, cell) in cells.iter_mut().zip(rec.iter()) {
            col.push(parse_cell(cell, options));
        }
    }
    if cells.is_empty() {
        return Err(Error::NoRows);
    }
    let names = names.unwrap_or_else(|| (1..=width).map(|i| format!("V{i}")).collect());
    let columns = names
        .into_iter()
        .zip(cells)
        .map(|(n, c)| Column::from_options(n, c))
        .collect();
    Ok(Dataset::new(columns)?)
}

/// Shortest decimal that parses back to the same `f64`; scientific notation
/// for very large or very small magnitudes.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn write_csv(ds: &Dataset, writer: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    w.write_record(ds.columns().iter().map(Column::name))?;
    for r in 0..ds.n_rows() {
        w.write_record(ds.columns().iter().map(|c| match c.get(r) {
            Some(v) => format_real(v),
            None => "NA".to_string(),
        }))?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(ds, std::io::BufWriter::new(file))
}
