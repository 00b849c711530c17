//! Directed network inference for multivariate time-series.
//!
//! The crate provides large-scale extended Granger causality ([`lsxgc`]),
//! three baseline estimators ([`baselines`]), a synthetic fMRI-like data
//! generator with known ground truth ([`simulator`]) and the scoring
//! harness used to compare them ([`evaluation`]).
//!
//! Matrix-level routines are data-parallel through rayon when the default
//! `parallel` feature is enabled; every routine also has a `_with` variant
//! taking an explicit [`Execution`] mode.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod lsxgc;
pub mod method;
pub mod numerics;
pub mod parallel;
pub mod simulator;

#[cfg(test)]
pub(crate) mod testutil;

pub use data::{AnalysisConfig, CausalityMatrix, GroundTruthGraph, TimeSeriesEnsemble};
pub use error::{Error, Result};
pub use method::Method;
pub use parallel::Execution;
