//! Sparse linear regression by bootstrapped adaptive threshold selection,
//! with from-scratch ridge / lasso / elastic-net baselines and a synthetic
//! benchmarking harness.
//!
//! The pieces, bottom-up:
//!
//! - [`model`]: datasets, weight vectors, ordinary least squares.
//! - [`regularizers`]: ridge (closed form) and lasso / elastic net
//!   (coordinate descent).
//! - [`boats`]: permutation-null estimation, adaptive thresholding, and the
//!   threshold sweep.
//! - [`synthgen`]: the four synthetic weight families and dataset assembly.
//! - [`evaluation`]: splits, metrics, and the bootstrapped model-selection
//!   protocol.
//! - [`experiment`] / [`tabular`] / [`commands`]: benchmark grids, file
//!   formats, and the operations behind the `boats` binary.
//!
//! Determinism is a hard guarantee: every random draw derives from a master
//! seed via [`seed::derive`], and results are independent of worker count.

pub mod boats;
pub mod commands;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod model;
pub mod parallel;
pub mod regularizers;
pub mod seed;
pub mod synthgen;
pub mod tabular;
pub mod util;

pub use error::{Error, Result};
pub use model::{Dataset, FitResult, Method, Support, WeightVector};
