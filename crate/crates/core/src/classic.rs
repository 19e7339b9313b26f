//! Pearson's r, Spearman's ρ and Kendall's τ-b.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::copula::average_ranks;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ClassicMeasure {
    Pearson,
    Spearman,
    Kendall,
}

impl fmt::Display for ClassicMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicMeasure::Pearson => "pearson",
            ClassicMeasure::Spearman => "spearman",
            ClassicMeasure::Kendall => "kendall",
        })
    }
}

/// A correlation coefficient in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStat {
    pub value: f64,
    pub n: usize,
    pub measure: ClassicMeasure,
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Constant);
    }
    // The 1/(n-1) factors of covariance and both deviations cancel.
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<PairStat> {
    check_pair(x, y)?;
    Ok(PairStat {
        value: correlation(x, y)?,
        n: x.len(),
        measure: ClassicMeasure::Pearson,
    })
}

/// Pearson correlation of mid-ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<PairStat> {
    check_pair(x, y)?;
    let value = correlation(&average_ranks(x), &average_ranks(y))?;
    Ok(PairStat {
        value,
        n: x.len(),
        measure: ClassicMeasure::Spearman,
    })
}

/// Number of pairs `n(n-1)/2` within each run of equal values of a sorted slice.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Stable merge sort of `v` that returns the number of inversions removed.
fn sort_counting_swaps(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut v[..mid], &mut buf[..mid]);
    swaps += sort_counting_swaps(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            // v[j] jumps over every remaining left element
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Counts behind τ-b, obtained in O(n log n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KendallCounts {
    pub n_pairs: u64,
    /// Pairs tied in x.
    pub ties_x: u64,
    /// Pairs tied in y.
    pub ties_y: u64,
    /// Concordant minus discordant pairs.
    pub score: i64,
}

impl KendallCounts {
    pub fn tau_b(&self) -> Result<f64> {
        let nx = self.n_pairs - self.ties_x;
        let ny = self.n_pairs - self.ties_y;
        if nx == 0 || ny == 0 {
            return Err(Error::Constant);
        }
        Ok((self.score as f64 / libm::sqrt(nx as f64 * ny as f64)).clamp(-1.0, 1.0))
    }
}

/// Knight's algorithm: sort by (x, y), then count the exchanges a merge sort
/// on y needs. Those exchanges are exactly the discordant pairs.
pub fn kendall_counts(x: &[f64], y: &[f64]) -> Result<KendallCounts> {
    check_pair(x, y)?;
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .unwrap_or(Ordering::Equal)
            .then(y[a].partial_cmp(&y[b]).unwrap_or(Ordering::Equal))
    });
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let ties_x = tied_pairs(&xs);
    let pairs: Vec<(f64, f64)> = order.iter().map(|&i| (x[i], y[i])).collect();
    let ties_xy = tied_pairs(&pairs);
    let mut buf = alloc::vec![0.0; n];
    let discordant = sort_counting_swaps(&mut ys, &mut buf);
    let ties_y = tied_pairs(&ys);
    let n_pairs = (n as u64) * (n as u64 - 1) / 2;
    // concordant + discordant = n0 - tx - ty + txy
    let untied = n_pairs + ties_xy - ties_x - ties_y;
    let score = untied as i64 - 2 * discordant as i64;
    Ok(KendallCounts {
        n_pairs,
        ties_x,
        ties_y,
        score,
    })
}

pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<PairStat> {
    let value = kendall_counts(x, y)?.tau_b()?;
    Ok(PairStat {
        value,
        n: x.len(),
        measure: ClassicMeasure::Kendall,
    })
}

pub fn pair_stat(measure: ClassicMeasure, x: &[f64], y: &[f64]) -> Result<PairStat> {
    match measure {
        ClassicMeasure::Pearson => pearson_r(x, y),
        ClassicMeasure::Spearman => spearman_rho(x, y),
        ClassicMeasure::Kendall => kendall_tau(x, y),
    }
}
