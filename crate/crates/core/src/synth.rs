//! Seeded synthetic datasets with known dependence structure.
//!
//! Gaussian kinds multiply rows of independent standard normals by the
//! Cholesky factor of the correlation matrix. All randomness comes from one
//! [`SplitMix64`] stream per call, consumed row by row.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dataset::{Column, Dataset};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Deterministic link for the functional kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Transform {
    /// `x³` with `x ~ N(0, 1)`.
    Cube,
    /// `eˣ` with `x ~ N(0, 1)`.
    Exp,
    /// `sin x` with `x ~ U(−2π, 2π)`: two full periods, so the linear
    /// correlation is weak although `y` is a function of `x`.
    Sin,
}

impl Transform {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Transform::Cube => x * x * x,
            Transform::Exp => libm::exp(x),
            Transform::Sin => libm::sin(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SynthKind {
    GaussianPair {
        rho: f64,
    },
    GaussianMatrix {
        correlation: Vec<Vec<f64>>,
    },
    Functional {
        transform: Transform,
        noise_sd: f64,
    },
    /// Gaussian columns in consecutive groups, correlation `within_rho`
    /// inside a group and `between_rho` across groups.
    Blocks {
        sizes: Vec<usize>,
        within_rho: f64,
        between_rho: f64,
    },
    /// Groups driven by one latent `u ~ U(0, 1)` each; member `m` (1-based) is
    /// `cos(mπu) + noise`. Members are pairwise uncorrelated in population yet
    /// functionally dependent.
    HarmonicBlocks {
        sizes: Vec<usize>,
        noise_sd: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthSpec {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: SynthKind,
    pub n_rows: usize,
    #[cfg_attr(feature = "serde", serde(default = "default_seed"))]
    pub seed: u64,
}

#[cfg(feature = "serde")]
fn default_seed() -> u64 {
    1
}

impl SynthSpec {
    pub fn gaussian_pair(rho: f64, n_rows: usize, seed: u64) -> Self {
        SynthSpec {
            kind: SynthKind::GaussianPair { rho },
            n_rows,
            seed,
        }
    }

    pub fn blocks(sizes: Vec<usize>, within_rho: f64, between_rho: f64, n_rows: usize, seed: u64) -> Self {
        SynthSpec {
            kind: SynthKind::Blocks {
                sizes,
                within_rho,
                between_rho,
            },
            n_rows,
            seed,
        }
    }

    /// Column groups by construction, for the block kinds.
    pub fn ground_truth_groups(&self) -> Option<Vec<Vec<usize>>> {
        let sizes = match &self.kind {
            SynthKind::Blocks { sizes, .. } | SynthKind::HarmonicBlocks { sizes, .. } => sizes,
            _ => return None,
        };
        let mut start = 0;
        Some(
            sizes
                .iter()
                .map(|&s| {
                    let g = (start..start + s).collect();
                    start += s;
                    g
                })
                .collect(),
        )
    }
}

/// Lower-triangular `L` with `L Lᵀ = a`, tolerating positive semi-definite
/// input (zero pivots give zero columns).
pub fn cholesky_psd(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidSpec("correlation matrix must be square".into()));
    }
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || libm::fabs(v - a[j][i]) > 1e-12 {
                return Err(Error::InvalidSpec(
                    "correlation matrix must be finite and symmetric".into(),
                ));
            }
        }
    }
    const TOL: f64 = 1e-10;
    let mut l = alloc::vec![alloc::vec![0.0; n]; n];
    for j in 0..n {
        let pivot = a[j][j] - (0..j).map(|p| l[j][p] * l[j][p]).sum::<f64>();
        if pivot < -TOL {
            return Err(Error::NotPositiveSemiDefinite);
        }
        if pivot <= TOL {
            // dependent direction: the rest of this column must vanish too
            for i in j + 1..n {
                let r = a[i][j] - (0..j).map(|p| l[i][p] * l[j][p]).sum::<f64>();
                if libm::fabs(r) > 1e-8 {
                    return Err(Error::NotPositiveSemiDefinite);
                }
            }
            continue;
        }
        let d = libm::sqrt(pivot);
        l[j][j] = d;
        for i in j + 1..n {
            l[i][j] = (a[i][j] - (0..j).map(|p| l[i][p] * l[j][p]).sum::<f64>()) / d;
        }
    }
    Ok(l)
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && libm::fabs(rho) < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("|rho| must be < 1, got {rho}")))
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes.iter().any(|&s| s < 2) {
        return Err(Error::InvalidSpec("group sizes must be >= 2".into()));
    }
    Ok(())
}

fn named(prefix: &str, columns: Vec<Vec<f64>>, n_rows: usize) -> Result<Dataset> {
    let cols = columns
        .into_iter()
        .enumerate()
        .map(|(i, v)| Column::new(format!("{prefix}{}", i + 1), v))
        .collect();
    Dataset::with_rows(n_rows, cols)
}

fn gaussian(correlation: &[Vec<f64>], n_rows: usize, rng: &mut SplitMix64) -> Result<Vec<Vec<f64>>> {
    for (i, row) in correlation.iter().enumerate() {
        if row.get(i).is_none_or(|&d| libm::fabs(d - 1.0) > 1e-12) {
            return Err(Error::InvalidSpec("correlation matrix needs a unit diagonal".into()));
        }
    }
    let l = cholesky_psd(correlation)?;
    let d = l.len();
    let mut cols = alloc::vec![Vec::with_capacity(n_rows); d];
    let mut z = alloc::vec![0.0; d];
    for _ in 0..n_rows {
        for zi in z.iter_mut() {
            *zi = rng.standard_normal();
        }
        for (i, col) in cols.iter_mut().enumerate() {
            col.push((0..=i).map(|p| l[i][p] * z[p]).sum());
        }
    }
    Ok(cols)
}

fn block_correlation(sizes: &[usize], within: f64, between: f64) -> Vec<Vec<f64>> {
    let group: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(g, &s)| core::iter::repeat_n(g, s))
        .collect();
    let n = group.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        1.0
                    } else if group[i] == group[j] {
                        within
                    } else {
                        between
                    }
                })
                .collect()
        })
        .collect()
}

/// Draws the dataset described by `spec`. Same spec, same bits.
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    let n = spec.n_rows;
    let mut rng = SplitMix64::new(spec.seed);
    match &spec.kind {
        SynthKind::GaussianPair { rho } => {
            check_rho(*rho)?;
            let cols = gaussian(&[alloc::vec![1.0, *rho], alloc::vec![*rho, 1.0]], n, &mut rng)?;
            let mut it = cols.into_iter();
            let (x, y) = (it.next().unwrap_or_default(), it.next().unwrap_or_default());
            Dataset::with_rows(n, alloc::vec![Column::new("x", x), Column::new("y", y)])
        }
        SynthKind::GaussianMatrix { correlation } => {
            if correlation.is_empty() {
                return Err(Error::InvalidSpec("correlation matrix is empty".into()));
            }
            named("v", gaussian(correlation, n, &mut rng)?, n)
        }
        SynthKind::Functional { transform, noise_sd } => {
            if !(noise_sd.is_finite() && *noise_sd >= 0.0) {
                return Err(Error::InvalidSpec(format!("noise_sd must be >= 0, got {noise_sd}")));
            }
            let mut x = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            for _ in 0..n {
                let xv = match transform {
                    Transform::Sin => rng.uniform(-2.0 * PI, 2.0 * PI),
                    _ => rng.standard_normal(),
                };
                let noise = if *noise_sd > 0.0 {
                    noise_sd * rng.standard_normal()
                } else {
                    0.0
                };
                x.push(xv);
                y.push(transform.apply(xv) + noise);
            }
            Dataset::with_rows(n, alloc::vec![Column::new("x", x), Column::new("y", y)])
        }
        SynthKind::Blocks {
            sizes,
            within_rho,
            between_rho,
        } => {
            check_sizes(sizes)?;
            check_rho(*within_rho)?;
            check_rho(*between_rho)?;
            named(
                "v",
                gaussian(&block_correlation(sizes, *within_rho, *between_rho), n, &mut rng)?,
                n,
            )
        }
        SynthKind::HarmonicBlocks { sizes, noise_sd } => {
            check_sizes(sizes)?;
            if !(noise_sd.is_finite() && *noise_sd >= 0.0) {
                return Err(Error::InvalidSpec(format!("noise_sd must be >= 0, got {noise_sd}")));
            }
            let total: usize = sizes.iter().sum();
            let mut cols = alloc::vec![Vec::with_capacity(n); total];
            for _ in 0..n {
                let mut c = 0;
                for &s in sizes {
                    let u = rng.next_f64();
                    for m in 1..=s {
                        let noise = if *noise_sd > 0.0 {
                            noise_sd * rng.standard_normal()
                        } else {
                            0.0
                        };
                        cols[c].push(libm::cos(m as f64 * PI * u) + noise);
                        c += 1;
                    }
                }
            }
            named("v", cols, n)
        }
    }
}

/// Short human-readable tag, e.g. for log lines.
pub fn describe(spec: &SynthSpec) -> String {
    match &spec.kind {
        SynthKind::GaussianPair { rho } => format!("gaussian_pair(rho={rho})"),
        SynthKind::GaussianMatrix { correlation } => format!("gaussian_matrix({}x{0})", correlation.len()),
        SynthKind::Functional { transform, noise_sd } => format!("functional({transform:?}, sd={noise_sd})"),
        SynthKind::Blocks { sizes, within_rho, .. } => format!("blocks({sizes:?}, rho={within_rho})"),
        SynthKind::HarmonicBlocks { sizes, noise_sd } => format!("harmonic_blocks({sizes:?}, sd={noise_sd})"),
    }
}
