//! Kozachenko–Leonenko entropy and the copula-entropy quantities built on it.
//!
//! For `n` points in `d` dimensions with `ε_i` the distance from point `i` to
//! its k-th nearest neighbour,
//!
//! ```text
//! Ĥ = −ψ(k) + ψ(n) + ln c_d + (d/n) Σ ln ε_i
//! ```
//!
//! where `c_d` is the volume of the metric's unit ball (`2^d` for the max
//! norm). Copula entropy is this estimate applied to the rank-transformed
//! sample, and mutual information is its negation. All values are in nats.

use alloc::vec::Vec;

use crate::copula::{rank_transform_with, RankMode};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::knn::{kth_neighbor_distances, Metric, Points};
use crate::rng::SplitMix64;
use crate::special::{digamma, log_unit_ball_chebyshev, log_unit_ball_euclidean};

/// Tuning for the kNN estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct EstimatorConfig {
    pub k: usize,
    pub metric: Metric,
    /// Upper bound of the uniform noise added to each coordinate before the
    /// neighbour search. Zero disables it.
    pub jitter_magnitude: f64,
    pub jitter_seed: u64,
    /// Tie rule for the rank transform.
    pub rank_mode: RankMode,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            k: 3,
            metric: Metric::Chebyshev,
            jitter_magnitude: 1e-10,
            jitter_seed: 1,
            rank_mode: RankMode::Maximal,
        }
    }
}

impl EstimatorConfig {
    pub fn with_seed(self, jitter_seed: u64) -> Self {
        EstimatorConfig { jitter_seed, ..self }
    }

    pub fn with_k(self, k: usize) -> Self {
        EstimatorConfig { k, ..self }
    }

    pub fn validate(&self, n_rows: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::ZeroK);
        }
        if !(self.jitter_magnitude.is_finite() && self.jitter_magnitude >= 0.0) {
            return Err(Error::InvalidJitter(self.jitter_magnitude));
        }
        if n_rows <= self.k {
            return Err(Error::KTooLarge { k: self.k, n: n_rows });
        }
        Ok(())
    }
}

/// An entropy value in nats with the context it was computed in.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntropyEstimate {
    pub value: f64,
    pub n_samples: usize,
    pub dim: usize,
    pub config: EstimatorConfig,
}

/// Adds uniform `[0, magnitude)` noise to every coordinate, row by row.
fn jitter(points: &mut Points, magnitude: f64, seed: u64) {
    if magnitude == 0.0 {
        return;
    }
    let mut rng = SplitMix64::new(seed);
    for v in points.as_mut_slice() {
        *v += magnitude * rng.next_f64();
    }
}

/// Kozachenko–Leonenko differential entropy of a point cloud.
pub fn knn_entropy(points: &Points, cfg: &EstimatorConfig) -> Result<EntropyEstimate> {
    let n = points.len();
    let d = points.dim();
    cfg.validate(n)?;
    if points.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut pts = points.clone();
    jitter(&mut pts, cfg.jitter_magnitude, cfg.jitter_seed);
    let eps = kth_neighbor_distances(&pts, cfg.k, cfg.metric)?;
    let mut sum_log = 0.0;
    for (index, &e) in eps.iter().enumerate() {
        if e <= 0.0 {
            return Err(Error::ZeroDistance { index });
        }
        sum_log += libm::log(e);
    }
    let log_volume = match cfg.metric {
        Metric::Chebyshev => log_unit_ball_chebyshev(d),
        Metric::Euclidean => log_unit_ball_euclidean(d),
    };
    let value = -digamma(cfg.k as f64) + digamma(n as f64) + log_volume + d as f64 * sum_log / n as f64;
    Ok(EntropyEstimate {
        value,
        n_samples: n,
        dim: d,
        config: *cfg,
    })
}

/// Copula entropy: kNN entropy of the empirical-copula pseudo-observations.
/// Negative for dependent variables, zero under independence.
pub fn copula_entropy(ds: &Dataset, cfg: &EstimatorConfig) -> Result<EntropyEstimate> {
    if ds.n_cols() < 2 {
        return Err(Error::TooFewColumns {
            needed: 2,
            got: ds.n_cols(),
        });
    }
    ds.require_complete()?;
    cfg.validate(ds.n_rows())?;
    let po = rank_transform_with(ds, cfg.rank_mode)?;
    let points = Points::from_columns(po.columns())?;
    knn_entropy(&points, cfg)
}

/// Mutual information, the negated copula entropy.
pub fn mutual_information(ds: &Dataset, cfg: &EstimatorConfig) -> Result<EntropyEstimate> {
    let ce = copula_entropy(ds, cfg)?;
    Ok(EntropyEstimate { value: -ce.value, ..ce })
}

/// Joint, marginal and copula entropies of one sample, which should satisfy
/// `joint = Σ marginals + ce`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub joint: EntropyEstimate,
    pub marginals: Vec<EntropyEstimate>,
    pub ce: EntropyEstimate,
    /// `joint − (Σ marginals + ce)`.
    pub residual: f64,
}

/// Estimates each term of the entropy decomposition on raw data.
pub fn decomposition_report(ds: &Dataset, cfg: &EstimatorConfig) -> Result<Decomposition> {
    let ce = copula_entropy(ds, cfg)?;
    let cols = ds.complete_columns()?;
    let joint = knn_entropy(&Points::from_columns(&cols)?, cfg)?;
    let marginals = cols
        .iter()
        .map(|c| knn_entropy(&Points::from_columns(&[c])?, cfg))
        .collect::<Result<Vec<_>>>()?;
    let sum_marginals: f64 = marginals.iter().map(|m| m.value).sum();
    Ok(Decomposition {
        residual: joint.value - (sum_marginals + ce.value),
        joint,
        marginals,
        ce,
    })
}
