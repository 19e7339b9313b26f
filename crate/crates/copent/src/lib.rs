//! Association discovery with copula entropy: data ingest, parallel matrix
//! building, serialisation, heatmaps and the `copent` command line.
//!
//! The estimators themselves live in [`copent_core`], re-exported here.

pub mod cli;
pub mod csv_io;
mod error;
pub mod fetch;
pub mod heatmap;
pub mod matrix_io;
pub mod parallel;
pub mod xpt;

pub use copent_core;
pub use error::{Error, Result};
