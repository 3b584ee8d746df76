//! Sensor-data preprocessing: anomaly detection and redundancy elimination.
//!
//! The crate is `no_std` (it only needs `alloc`) so the algorithms can run on a
//! gateway or a constrained collector as well as on a workstation. File IO,
//! CSV/JSON formats and the command-line driver live in the `senseprep` crate.
//!
//! Pipeline overview:
//!
//! * [`ingest`]: dataset representation, standardization, discretization into
//!   per-node states, error injection and synthetic generators.
//! * [`spectra`]: PCA of the sample correlation matrix, the Q (SPE) and
//!   Hotelling T² statistics and their control limits.
//! * [`bayesnet`]: counting, CPT estimation, likelihood scoring, greedy
//!   structure search and cycle repair for static and two-slice networks.
//! * [`anomaly`]: two-stage detection (Q/T² screening, then per-node
//!   localization with a naive-Bayes state predictor).
//! * [`redundancy`]: static redundant-node detection, real-time sleep/wake
//!   scheduling and weighted recovery of redundant readings.
//! * [`metrics`]: precision/recall and RMSE.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod anomaly;
pub mod bayesnet;
mod error;
pub mod ingest;
pub mod matrix;
pub mod metrics;
pub mod redundancy;
pub mod spectra;

pub use error::{Error, Result};
pub use matrix::Matrix;
