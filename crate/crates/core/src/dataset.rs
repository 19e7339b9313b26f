//! Column-major numeric tables with an explicit missing-value mask.
//!
//! A masked entry keeps a placeholder in `values` (NaN) but is never handed
//! to an estimator: every consumer goes through [`Column::get`] or
//! [`Column::complete_values`].

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// One named column. `missing[i]` marks entry `i` as absent.
#[derive(Debug, Clone)]
pub struct Column {
    name: String,
    values: Vec<f64>,
    missing: Vec<bool>,
}

impl Column {
    /// A fully observed column.
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        let missing = alloc::vec![false; values.len()];
        Column {
            name: name.into(),
            values,
            missing,
        }
    }

    /// Builds a column from optional cells; `None` becomes a masked entry.
    pub fn from_options(name: impl Into<String>, cells: impl IntoIterator<Item = Option<f64>>) -> Self {
        let (values, missing) = cells
            .into_iter()
            .map(|c| match c {
                Some(v) => (v, false),
                None => (f64::NAN, true),
            })
            .unzip();
        Column {
            name: name.into(),
            values,
            missing,
        }
    }

    /// A column where every entry is missing (used for character variables).
    pub fn all_missing(name: impl Into<String>, len: usize) -> Self {
        Column {
            name: name.into(),
            values: alloc::vec![f64::NAN; len],
            missing: alloc::vec![true; len],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, row: usize) -> Option<f64> {
        if self.missing[row] {
            None
        } else {
            Some(self.values[row])
        }
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.missing[row]
    }

    pub fn missing_mask(&self) -> &[bool] {
        &self.missing
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.values
            .iter()
            .zip(&self.missing)
            .map(|(&v, &m)| if m { None } else { Some(v) })
    }

    /// The raw values, provided no entry is masked.
    pub fn complete_values(&self) -> Result<&[f64]> {
        if self.missing.iter().any(|&m| m) {
            return Err(Error::MissingValues(self.name.clone()));
        }
        Ok(&self.values)
    }

    fn renamed(&self, name: String) -> Self {
        Column { name, ..self.clone() }
    }
}

impl PartialEq for Column {
    /// Masked slots are ignored; observed values compare bitwise so that
    /// `-0.0 != 0.0` and identical NaN payloads are equal.
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.missing == other.missing
            && self.iter().zip(other.iter()).all(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => a.to_bits() == b.to_bits(),
                (None, None) => true,
                _ => false,
            })
    }
}

/// An immutable column-major table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    n_rows: usize,
}

impl Dataset {
    /// Validates lengths and names. A dataset without columns has zero rows.
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Column::len);
        Self::with_rows(n_rows, columns)
    }

    /// Like [`Dataset::new`] but with an explicit row count, so that a
    /// zero-column table can still carry its height.
    pub fn with_rows(n_rows: usize, columns: Vec<Column>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(Error::EmptyName);
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateName(c.name.clone()));
            }
            if c.values.len() != n_rows || c.missing.len() != n_rows {
                return Err(Error::ColumnLength {
                    name: c.name.clone(),
                    expected: n_rows,
                    got: c.values.len(),
                });
            }
        }
        Ok(Dataset { columns, n_rows })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.columns[col].get(row)
    }

    pub fn has_missing(&self) -> bool {
        self.columns.iter().any(|c| c.missing.iter().any(|&m| m))
    }

    /// Fails with [`Error::MissingValues`] naming the first incomplete column.
    pub fn require_complete(&self) -> Result<()> {
        match self.columns.iter().find(|c| c.missing.iter().any(|&m| m)) {
            Some(c) => Err(Error::MissingValues(c.name.clone())),
            None => Ok(()),
        }
    }

    /// Every column's values, failing if any entry is masked.
    pub fn complete_columns(&self) -> Result<Vec<&[f64]>> {
        self.columns.iter().map(Column::complete_values).collect()
    }

    /// Sub-dataset with the given zero-based column indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut cols = Vec::with_capacity(indices.len());
        for &i in indices {
            let c = self.columns.get(i).ok_or(Error::IndexOutOfBounds {
                index: i + 1,
                n_cols: self.n_cols(),
            })?;
            cols.push(c.clone());
        }
        Dataset::with_rows(self.n_rows, cols)
    }

    /// Applies `f` to every observed entry of every column.
    pub fn map_values(&self, mut f: impl FnMut(usize, f64) -> f64) -> Dataset {
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(ci, c)| Column {
                name: c.name.clone(),
                values: c
                    .values
                    .iter()
                    .zip(&c.missing)
                    .map(|(&v, &m)| if m { v } else { f(ci, v) })
                    .collect(),
                missing: c.missing.clone(),
            })
            .collect();
        Dataset {
            columns,
            n_rows: self.n_rows,
        }
    }

    /// Renames columns; the new names must be unique.
    pub fn with_names(&self, names: &[String]) -> Result<Dataset> {
        if names.len() != self.n_cols() {
            return Err(Error::TooFewColumns {
                needed: self.n_cols(),
                got: names.len(),
            });
        }
        let cols = self
            .columns
            .iter()
            .zip(names)
            .map(|(c, n)| c.renamed(n.clone()))
            .collect();
        Dataset::with_rows(self.n_rows, cols)
    }
}

/// How missing entries are handled before estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ImputePolicy {
    /// Replace each missing entry by its column's observed mean.
    #[default]
    Mean,
    /// Remove every row that has at least one missing entry.
    DropRows,
    /// Leave the data alone; estimators reject missing entries.
    None,
}

impl core::str::FromStr for ImputePolicy {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "mean" => Ok(ImputePolicy::Mean),
            "drop_rows" | "drop-rows" => Ok(ImputePolicy::DropRows),
            "none" => Ok(ImputePolicy::None),
            other => Err(alloc::format!(
                "unknown impute policy {other:?} (expected mean, drop_rows or none)"
            )),
        }
    }
}

impl fmt::Display for ImputePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImputePolicy::Mean => "mean",
            ImputePolicy::DropRows => "drop_rows",
            ImputePolicy::None => "none",
        })
    }
}

/// Fills or removes missing entries. Observed values are never modified.
pub fn impute(ds: &Dataset, policy: ImputePolicy) -> Result<Dataset> {
    match policy {
        ImputePolicy::None => Ok(ds.clone()),
        ImputePolicy::Mean => {
            let mut columns = Vec::with_capacity(ds.n_cols());
            for c in &ds.columns {
                let missing = c.missing_count();
                if missing == 0 {
                    columns.push(c.clone());
                    continue;
                }
                let observed = c.len() - missing;
                if observed == 0 {
                    return Err(Error::AllMissing(c.name.clone()));
                }
                let sum: f64 = c.iter().flatten().sum();
                let mean = sum / observed as f64;
                columns.push(Column::new(
                    c.name.clone(),
                    c.iter().map(|v| v.unwrap_or(mean)).collect(),
                ));
            }
            Dataset::with_rows(ds.n_rows, columns)
        }
        ImputePolicy::DropRows => {
            let keep: Vec<usize> = (0..ds.n_rows)
                .filter(|&r| ds.columns.iter().all(|c| !c.missing[r]))
                .collect();
            if keep.len() == ds.n_rows {
                return Ok(ds.clone());
            }
            if keep.is_empty() {
                return Err(Error::NoRowsLeft);
            }
            let columns = ds
                .columns
                .iter()
                .map(|c| Column::new(c.name.clone(), keep.iter().map(|&r| c.values[r]).collect()))
                .collect();
            Dataset::with_rows(keep.len(), columns)
        }
    }
}

/// One element of a column selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    Name(String),
    /// 1-based column index.
    Index(usize),
    /// 1-based inclusive range, e.g. `288-302`.
    Range(usize, usize),
}

impl Selector {
    /// Parses one token: `7` is an index, `3-9` a range, anything else a name.
    pub fn parse(token: &str) -> Result<Selector> {
        let t = token.trim();
        if t.is_empty() {
            return Err(Error::InvalidSelector(token.to_string()));
        }
        if t.bytes().all(|b| b.is_ascii_digit()) {
            return t
                .parse()
                .map(Selector::Index)
                .map_err(|_| Error::InvalidSelector(token.to_string()));
        }
        if let Some((a, b)) = t.split_once('-') {
            let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
            if digits(a) && digits(b) {
                let lo: usize = a.parse().map_err(|_| Error::InvalidSelector(token.to_string()))?;
                let hi: usize = b.parse().map_err(|_| Error::InvalidSelector(token.to_string()))?;
                if lo == 0 || hi < lo {
                    return Err(Error::InvalidSelector(token.to_string()));
                }
                return Ok(Selector::Range(lo, hi));
            }
        }
        Ok(Selector::Name(t.to_string()))
    }

    /// Parses a comma-separated list such as `LBXGLU,10-46,3`.
    pub fn parse_list(spec: &str) -> Result<Vec<Selector>> {
        if spec.trim().is_empty() {
            return Err(Error::EmptySelection);
        }
        spec.split(',').map(Selector::parse).collect()
    }
}

/// Resolves selectors to zero-based column indices in request order.
pub fn resolve_selection(ds: &Dataset, selectors: &[Selector]) -> Result<Vec<usize>> {
    let n_cols = ds.n_cols();
    let check = |index: usize| {
        if index == 0 || index > n_cols {
            Err(Error::IndexOutOfBounds { index, n_cols })
        } else {
            Ok(index - 1)
        }
    };
    let mut out = Vec::new();
    for s in selectors {
        match s {
            Selector::Name(name) => out.push(
                ds.column_index(name)
                    .ok_or_else(|| Error::UnknownColumn(name.clone()))?,
            ),
            Selector::Index(i) => out.push(check(*i)?),
            Selector::Range(lo, hi) => {
                for i in *lo..=*hi {
                    out.push(check(i)?);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(out)
}

/// A new dataset holding exactly the requested columns, in request order.
pub fn select_columns(ds: &Dataset, selectors: &[Selector]) -> Result<Dataset> {
    let idx = resolve_selection(ds, selectors)?;
    ds.subset(&idx)
}
