//! Pairwise association matrices and thresholded group extraction.
//!
//! Every unordered column pair is evaluated once and mirrored. The diagonal
//! holds no value. A pair involving a constant column also holds no value and
//! produces a [`PairWarning`] instead of aborting the whole matrix.
//!
//! For copula entropy the entry is the two-column mutual information. Its
//! jitter seed is derived from the global seed and the sorted name pair, and
//! the two columns are always fed in name order, so an entry depends only on
//! the data and names of its two columns, never on their positions.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::classic::{pair_stat, ClassicMeasure};
use crate::dataset::Dataset;
use crate::entropy::{mutual_information, EstimatorConfig};
use crate::error::{Error, Result};
use crate::rng::mix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Measure {
    Pearson,
    Spearman,
    Kendall,
    /// Copula-entropy based mutual information (nats).
    Ce,
}

impl Measure {
    pub fn classic(self) -> Option<ClassicMeasure> {
        match self {
            Measure::Pearson => Some(ClassicMeasure::Pearson),
            Measure::Spearman => Some(ClassicMeasure::Spearman),
            Measure::Kendall => Some(ClassicMeasure::Kendall),
            Measure::Ce => None,
        }
    }

    /// Conventional grouping threshold: 0.1 nats for CE, 0.5 in absolute
    /// value for correlations.
    pub fn default_threshold(self) -> f64 {
        match self {
            Measure::Ce => 0.1,
            _ => 0.5,
        }
    }

    /// Strength compared against a grouping threshold.
    pub fn edge_strength(self, value: f64) -> f64 {
        match self {
            Measure::Ce => value,
            _ => libm::fabs(value),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Pearson => "pearson",
            Measure::Spearman => "spearman",
            Measure::Kendall => "kendall",
            Measure::Ce => "ce",
        })
    }
}

impl core::str::FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "pearson" => Ok(Measure::Pearson),
            "spearman" => Ok(Measure::Spearman),
            "kendall" => Ok(Measure::Kendall),
            "ce" => Ok(Measure::Ce),
            other => Err(alloc::format!(
                "unknown measure {other:?} (expected pearson, spearman, kendall or ce)"
            )),
        }
    }
}

/// A pair whose entry was left empty.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairWarning {
    /// Zero-based column indices, `i < j`.
    pub i: usize,
    pub j: usize,
    pub message: String,
}

/// Symmetric matrix of pairwise strengths. `None` is the "no value" sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMatrix {
    names: Vec<String>,
    measure: Measure,
    values: Vec<Option<f64>>,
    config: Option<EstimatorConfig>,
    warnings: Vec<PairWarning>,
}

impl AssociationMatrix {
    /// Builds a matrix from the strict upper triangle, row-major over `i < j`
    /// (the order of [`pair_indices`]).
    pub fn from_upper(
        names: Vec<String>,
        measure: Measure,
        config: Option<EstimatorConfig>,
        upper: impl IntoIterator<Item = Option<f64>>,
        warnings: Vec<PairWarning>,
    ) -> Result<Self> {
        let n = names.len();
        let mut values = alloc::vec![None; n * n];
        let mut count = 0;
        for ((i, j), v) in pair_indices(n).zip(upper) {
            values[i * n + j] = v;
            values[j * n + i] = v;
            count += 1;
        }
        let expected = n * n.saturating_sub(1) / 2;
        if count != expected {
            return Err(Error::ColumnLength {
                name: "upper triangle".into(),
                expected,
                got: count,
            });
        }
        Ok(AssociationMatrix {
            names,
            measure,
            values,
            config,
            warnings,
        })
    }

    /// Builds from a full square matrix. Off-diagonal entries must be
    /// symmetric; the diagonal is discarded.
    pub fn from_square(
        names: Vec<String>,
        measure: Measure,
        config: Option<EstimatorConfig>,
        rows: &[Vec<Option<f64>>],
    ) -> Result<Self> {
        let n = names.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ColumnLength {
                name: "matrix".into(),
                expected: n,
                got: rows.len(),
            });
        }
        for (i, j) in pair_indices(n) {
            let same = match (rows[i][j], rows[j][i]) {
                (Some(a), Some(b)) => a.to_bits() == b.to_bits(),
                (None, None) => true,
                _ => false,
            };
            if !same {
                return Err(Error::InvalidSpec(alloc::format!(
                    "matrix is not symmetric at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        Self::from_upper(
            names,
            measure,
            config,
            pair_indices(n).map(|(i, j)| rows[i][j]),
            Vec::new(),
        )
    }

    /// Replaces the attached pair warnings.
    pub fn with_warnings(self, warnings: Vec<PairWarning>) -> Self {
        AssociationMatrix { warnings, ..self }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn config(&self) -> Option<&EstimatorConfig> {
        self.config.as_ref()
    }

    pub fn warnings(&self) -> &[PairWarning] {
        &self.warnings
    }

    /// Entry `(i, j)`; always `None` on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            None
        } else {
            self.values[i * self.n() + j]
        }
    }

    pub fn rows(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Copy with negative CE entries raised to zero. Correlation matrices are
    /// returned unchanged.
    pub fn clamp_nonneg(&self) -> Self {
        let mut out = self.clone();
        if self.measure == Measure::Ce {
            for v in out.values.iter_mut().flatten() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        out
    }

    /// Smallest and largest off-diagonal value, if any.
    pub fn value_range(&self) -> Option<(f64, f64)> {
        pair_indices(self.n())
            .filter_map(|(i, j)| self.get(i, j))
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((f64::min(lo, v), f64::max(hi, v))),
            })
    }

    /// `(name_i, name_j, value)` for every `i < j`, row-major.
    pub fn long_form(&self) -> Vec<(String, String, Option<f64>)> {
        pair_indices(self.n())
            .map(|(i, j)| (self.names[i].clone(), self.names[j].clone(), self.get(i, j)))
            .collect()
    }
}

/// `(i, j)` with `i < j`, row-major.
pub fn pair_indices(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    bytes.into_iter().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Jitter seed for one column pair: FNV-1a over `lo 0xFF hi` (names sorted
/// bytewise), combined with the global seed through the SplitMix64 mixer.
pub fn pair_seed(global_seed: u64, a: &str, b: &str) -> u64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let h = fnv1a(lo.bytes().chain(core::iter::once(0xFF)).chain(hi.bytes()));
    mix64(global_seed ^ mix64(h))
}

fn is_constant(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Outcome of evaluating one pair.
#[derive(Debug, Clone, PartialEq)]
pub enum PairOutcome {
    Value(f64),
    Skipped(String),
}

/// Checks that `ds` can produce a matrix under `measure`.
pub fn validate_for_matrix(ds: &Dataset, measure: Measure, cfg: &EstimatorConfig) -> Result<()> {
    if ds.n_cols() < 2 {
        return Err(Error::TooFewColumns {
            needed: 2,
            got: ds.n_cols(),
        });
    }
    ds.require_complete()?;
    match measure {
        Measure::Ce => cfg.validate(ds.n_rows()),
        _ if ds.n_rows() < 2 => Err(Error::TooFewRows {
            needed: 2,
            got: ds.n_rows(),
        }),
        _ => Ok(()),
    }
}

/// Association between columns `i` and `j` of a complete dataset.
pub fn compute_pair(ds: &Dataset, i: usize, j: usize, measure: Measure, cfg: &EstimatorConfig) -> Result<PairOutcome> {
    let (ci, cj) = (ds.column(i), ds.column(j));
    for c in [ci, cj] {
        if is_constant(c.complete_values()?) {
            return Ok(PairOutcome::Skipped(alloc::format!(
                "column {:?} is constant; pair ({}, {}) left empty",
                c.name(),
                ci.name(),
                cj.name()
            )));
        }
    }
    match measure.classic() {
        Some(m) => Ok(PairOutcome::Value(
            pair_stat(m, ci.complete_values()?, cj.complete_values()?)?.value,
        )),
        None => {
            let (first, second) = if ci.name() <= cj.name() { (i, j) } else { (j, i) };
            let sub = ds.subset(&[first, second])?;
            let pair_cfg = cfg.with_seed(pair_seed(cfg.jitter_seed, ci.name(), cj.name()));
            Ok(PairOutcome::Value(mutual_information(&sub, &pair_cfg)?.value))
        }
    }
}

/// Assembles a matrix from outcomes listed in [`pair_indices`] order.
pub fn assemble(
    ds: &Dataset,
    measure: Measure,
    cfg: &EstimatorConfig,
    outcomes: Vec<PairOutcome>,
) -> Result<AssociationMatrix> {
    let mut warnings = Vec::new();
    let upper: Vec<Option<f64>> = pair_indices(ds.n_cols())
        .zip(outcomes)
        .map(|((i, j), o)| match o {
            PairOutcome::Value(v) => Some(v),
            PairOutcome::Skipped(message) => {
                warnings.push(PairWarning { i, j, message });
                None
            }
        })
        .collect();
    let config = (measure == Measure::Ce).then_some(*cfg);
    AssociationMatrix::from_upper(ds.names(), measure, config, upper, warnings)
}

/// Full pairwise matrix, evaluated sequentially.
pub fn association_matrix(ds: &Dataset, measure: Measure, cfg: &EstimatorConfig) -> Result<AssociationMatrix> {
    validate_for_matrix(ds, measure, cfg)?;
    let outcomes = pair_indices(ds.n_cols())
        .map(|(i, j)| compute_pair(ds, i, j, measure, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble(ds, measure, cfg, outcomes)
}

/// One connected group of associated variables.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Group {
    /// Zero-based, ascending.
    pub members: Vec<usize>,
    pub names: Vec<String>,
    /// Statistics over the above-threshold edges inside the group.
    pub n_edges: usize,
    pub min_strength: f64,
    pub mean_strength: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupReport {
    pub groups: Vec<Group>,
    pub threshold: f64,
    pub measure: Measure,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the graph whose edges are pairs with strength at
/// or above `threshold` (absolute value for correlations). Singletons are
/// dropped; groups are ordered by size, largest first, then by smallest member.
///
/// Groups are components, not cliques: a chain `a-b-c` forms one group even if
/// `a` and `c` are weakly associated.
pub fn extract_groups(m: &AssociationMatrix, threshold: f64) -> Result<GroupReport> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let n = m.n();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut edges = Vec::new();
    for (i, j) in pair_indices(n) {
        if let Some(v) = m.get(i, j) {
            let s = m.measure.edge_strength(v);
            if s >= threshold {
                edges.push((i, j, s));
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let root = find(&mut parent, v);
        components.entry(root).or_default().push(v);
    }
    let mut groups: Vec<Group> = components
        .into_values()
        .filter(|members| members.len() >= 2)
        .map(|members| {
            let root = find(&mut parent, members[0]);
            let strengths: Vec<f64> = edges
                .iter()
                .filter(|(i, _, _)| find(&mut parent, *i) == root)
                .map(|&(_, _, s)| s)
                .collect();
            Group {
                names: members.iter().map(|&i| m.names[i].clone()).collect(),
                n_edges: strengths.len(),
                min_strength: strengths.iter().copied().fold(f64::INFINITY, f64::min),
                mean_strength: strengths.iter().sum::<f64>() / strengths.len() as f64,
                members,
            }
        })
        .collect();
    groups.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then(a.members[0].cmp(&b.members[0]))
    });
    Ok(GroupReport {
        groups,
        threshold,
        measure: m.measure,
    })
}

impl GroupReport {
    /// Member index sets, for comparing partitions.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        self.groups.iter().map(|g| g.members.clone()).collect()
    }
}

impl fmt::Display for GroupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} group(s), measure {}, threshold {}",
            self.groups.len(),
            self.measure,
            self.threshold
        )?;
        for (g, group) in self.groups.iter().enumerate() {
            let idx: Vec<String> = group.members.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(
                f,
                "group {}: [{}] {} (min {:.4}, mean {:.4})",
                g + 1,
                idx.join(","),
                group.names.join(","),
                group.min_strength,
                group.mean_strength
            )?;
        }
        Ok(())
    }
}
