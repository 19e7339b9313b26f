//! Empirical copula pseudo-observations.
//!
//! Entry `(t, i)` of the transform is `(1/T) · #{s : x[s,i] <= x[t,i]}`, the
//! empirical marginal CDF evaluated at the sample itself. Tied values share
//! the largest count of their tie group, so every column's maximum is exactly
//! one and all entries lie on the grid `{1/T, …, T/T}`.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// How tied values are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RankMode {
    /// `≤`-count: ties take the maximal rank of their group.
    #[default]
    Maximal,
    /// Ties take the mean rank of their group (opt-in, for comparisons).
    Averaged,
}

/// Rank-transformed copy of a dataset, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoObservations {
    columns: Vec<Vec<f64>>,
    names: Vec<String>,
    n_rows: usize,
}

impl PseudoObservations {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn source_names(&self) -> &[String] {
        &self.names
    }

    /// Row `t` as a vector of length `n_cols`.
    pub fn row(&self, t: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[t]).collect()
    }
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // Values are finite or at worst NaN-free; equal values compare Equal,
    // which also groups -0.0 with 0.0 as the `<=` count requires.
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    order
}

/// Calls `f(members_of_tie_group, first_position, last_position)` for each
/// run of equal values in sorted order (positions are 1-based ranks).
fn for_each_tie_group(values: &[f64], order: &[usize], mut f: impl FnMut(&[usize], usize, usize)) {
    let mut start = 0;
    while start < order.len() {
        let v = values[order[start]];
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == v {
            end += 1;
        }
        f(&order[start..end], start + 1, end);
        start = end;
    }
}

/// `≤`-counts: `ranks[t] = #{s : values[s] <= values[t]}`.
pub fn max_ranks(values: &[f64]) -> Vec<usize> {
    let order = sorted_order(values);
    let mut ranks = alloc::vec![0; values.len()];
    for_each_tie_group(values, &order, |members, _, last| {
        for &m in members {
            ranks[m] = last;
        }
    });
    ranks
}

/// Mid-ranks: tied values get the mean of the positions they occupy.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let order = sorted_order(values);
    let mut ranks = alloc::vec![0.0; values.len()];
    for_each_tie_group(values, &order, |members, first, last| {
        let r = (first + last) as f64 / 2.0;
        for &m in members {
            ranks[m] = r;
        }
    });
    ranks
}

/// Pseudo-observations by the literal `≤`-count rule.
pub fn rank_transform(ds: &Dataset) -> Result<PseudoObservations> {
    rank_transform_with(ds, RankMode::Maximal)
}

pub fn rank_transform_with(ds: &Dataset, mode: RankMode) -> Result<PseudoObservations> {
    let cols = ds.complete_columns()?;
    let n = ds.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let scale = n as f64;
    let columns = cols
        .iter()
        .map(|values| match mode {
            RankMode::Maximal => max_ranks(values).into_iter().map(|r| r as f64 / scale).collect(),
            RankMode::Averaged => average_ranks(values).into_iter().map(|r| r / scale).collect(),
        })
        .collect();
    Ok(PseudoObservations {
        columns,
        names: ds.names(),
        n_rows: n,
    })
}
