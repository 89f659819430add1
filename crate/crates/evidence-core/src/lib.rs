//! Numerical core for Bayesian evidence (marginal likelihood) estimation from
//! posterior samples.
//!
//! The centerpiece is a partition-based "hybrid" estimator: a CART-style
//! regression tree fitted to (draw, negative-log-posterior) pairs induces a
//! dyadic partition of the sample bounding box; each cell gets a representative
//! log-value minimizing a relative-error ℓ1 objective in the exponential
//! scale; cell masses are assembled by log-sum-exp. Competing estimators
//! (harmonic mean, corrected arithmetic mean, iterative bridge sampling with a
//! simplified warp variant), a zoo of benchmark models with analytically known
//! evidence, and brute-force quadrature oracles round out the crate.
//!
//! All evidence arithmetic happens in the log domain; raw densities are never
//! exponentiated globally (negative log posteriors of a few hundred would
//! otherwise underflow to zero).
//!
//! The crate is `no_std` + `alloc`; the companion `evidence-bench` crate
//! carries IO, CLI, and file formats.

#![cfg_attr(not(any(test, doctest)), no_std)]

extern crate alloc;

pub mod error;
pub mod linalg;
pub mod logmath;
pub mod special;

pub mod graph;
pub mod rng;
pub mod sampling;

pub mod partition;

pub mod hybrid;

pub mod baselines;

pub mod oracle;

pub mod models;

pub use error::{Error, Result};
