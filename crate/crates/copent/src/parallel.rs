//! Multi-threaded association matrix.
//!
//! Pairs are handed out through a shared counter and each result is written
//! to the slot of its pair index. Every pair's estimate depends only on its
//! own columns and seed, so the output is bit-identical for any job count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use copent_core::assoc::{assemble, compute_pair, pair_indices, validate_for_matrix, PairOutcome};
use copent_core::{AssociationMatrix, Dataset, EstimatorConfig, Measure};

pub fn association_matrix_parallel(
    ds: &Dataset,
    measure: Measure,
    cfg: &EstimatorConfig,
    jobs: usize,
) -> copent_core::Result<AssociationMatrix> {
    validate_for_matrix(ds, measure, cfg)?;
    let pairs: Vec<(usize, usize)> = pair_indices(ds.n_cols()).collect();
    let slots: Vec<OnceLock<copent_core::Result<PairOutcome>>> = pairs.iter().map(|_| OnceLock::new()).collect();
    let next = AtomicUsize::new(0);
    let workers = jobs.clamp(1, pairs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let p = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, j)) = pairs.get(p) else { break };
                let _ = slots[p].set(compute_pair(ds, i, j, measure, cfg));
            });
        }
    });
    let outcomes = slots
        .into_iter()
        .map(|s| s.into_inner().expect("every pair is evaluated"))
        .collect::<copent_core::Result<Vec<_>>>()?;
    assemble(ds, measure, cfg, outcomes)
}

/// Default worker count: the available parallelism, or 1 if unknown.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
