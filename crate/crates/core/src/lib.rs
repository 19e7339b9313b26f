//! Nonparametric association measures built around copula entropy.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! machinery: column-major datasets with missing-value masks, the empirical
//! copula rank transform, Kozachenko–Leonenko kNN entropy, copula entropy and
//! mutual information, Pearson/Spearman/Kendall, pairwise association
//! matrices with group extraction, and seeded synthetic data generators.
//!
//! File formats, the command line and parallel matrix building live in the
//! `copent` crate.
//!
//! ```
//! use copent_core::{synth, entropy::{mutual_information, EstimatorConfig}};
//!
//! let spec = synth::SynthSpec::gaussian_pair(0.9, 2000, 7);
//! let ds = synth::generate(&spec).unwrap();
//! let mi = mutual_information(&ds, &EstimatorConfig::default()).unwrap();
//! assert!((mi.value - 0.8304).abs() < 0.15);
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod assoc;
pub mod classic;
pub mod copula;
pub mod dataset;
pub mod entropy;
mod error;
pub mod knn;
pub mod rng;
pub mod special;
pub mod synth;

pub use assoc::{AssociationMatrix, GroupReport, Measure};
pub use copula::{PseudoObservations, RankMode};
pub use dataset::{Column, Dataset, ImputePolicy, Selector};
pub use entropy::{EntropyEstimate, EstimatorConfig};
pub use error::{Error, Result};
pub use knn::{Metric, Points};
