//! Matrix and group-report serialisation.
//!
//! Matrix CSV: a header of column names, then one row per variable with no
//! row-label column, `NA` for entries without a value (including the
//! diagonal). The CSV carries no measure, so readers are told which one it
//! holds. Matrix JSON carries names, measure, estimator config, values
//! (`null` for no value) and pair warnings.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use copent_core::assoc::PairWarning;
use copent_core::{AssociationMatrix, EstimatorConfig, GroupReport, Measure};
use serde::{Deserialize, Serialize};

use crate::csv_io::format_real;
use crate::error::{Error, Result};

pub fn write_matrix_csv(m: &AssociationMatrix, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(m.names())?;
    for row in m.rows() {
        w.write_record(row.iter().map(|v| v.map_or_else(|| "NA".to_string(), format_real)))?;
    }
    w.flush().map_err(|e| Error::io("<matrix output>", e))?;
    Ok(())
}

pub fn read_matrix_csv(reader: impl Read, measure: Measure) -> Result<AssociationMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::with_capacity(names.len());
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|cell| match cell.trim() {
                "NA" | "" => Ok(None),
                t => t
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(Some)
                    .ok_or_else(|| Error::Matrix(format!("unreadable matrix entry {t:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() != names.len() {
        return Err(Error::Matrix(format!(
            "{} names in header but {} rows",
            names.len(),
            rows.len()
        )));
    }
    Ok(AssociationMatrix::from_square(names, measure, None, &rows)?)
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    names: Vec<String>,
    measure: Measure,
    config: Option<EstimatorConfig>,
    values: Vec<Vec<Option<f64>>>,
    #[serde(default)]
    warnings: Vec<PairWarning>,
}

pub fn matrix_to_json(m: &AssociationMatrix) -> Result<String> {
    let doc = MatrixJson {
        names: m.names().to_vec(),
        measure: m.measure(),
        config: m.config().copied(),
        values: m.rows(),
        warnings: m.warnings().to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn matrix_from_json(s: &str) -> Result<AssociationMatrix> {
    let doc: MatrixJson = serde_json::from_str(s)?;
    Ok(AssociationMatrix::from_square(doc.names, doc.measure, doc.config, &doc.values)?.with_warnings(doc.warnings))
}

pub fn groups_to_json(report: &GroupReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Loads a matrix by extension: `.json` is self-describing, anything else is
/// read as matrix CSV holding `measure`.
pub fn load_matrix(path: impl AsRef<Path>, measure: Measure) -> Result<AssociationMatrix> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        matrix_from_json(&s)
    } else {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        read_matrix_csv(f, measure)
    }
}

pub fn save_matrix(m: &AssociationMatrix, path: impl AsRef<Path>, json: bool) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    if json {
        w.write_all(matrix_to_json(m)?.as_bytes())
            .map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    } else {
        write_matrix_csv(m, w)
    }
}
