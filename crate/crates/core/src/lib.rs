//! Prob-SARAH: a SARAH-style variance-reduced stochastic gradient method for
//! non-convex finite sums, with stopping rules that certify
//! `P(‖∇f(x̂)‖ ≤ ε) ≥ 1 − δ`.
//!
//! The crate is organised bottom-up:
//!
//! - [`data`]: LIBSVM parsing into a sparse [`data::Dataset`].
//! - [`objective`]: the [`objective::FiniteSum`] oracle trait, regularized
//!   logistic regression, synthetic quadratics, Euclidean-ball projection and
//!   the smoothness / gradient-bound constants.
//! - [`schedule`]: per-outer-iteration hyperparameters (settings A and B).
//! - [`bounds`]: stopping-time bounds `T1..T5` and iteration thresholds.
//! - [`optimizer`]: Prob-SARAH plus SGD, SVRG and SCSG baselines with IFO
//!   accounting.
//! - [`concentration`]: Monte-Carlo validators for the martingale
//!   Azuma-Hoeffding bound with random bounds, the without-replacement
//!   norm-Hoeffding bound, and a live monitor of the estimator-error bound.
//! - [`harness`]: seeded multi-run experiments, quantile trajectories and
//!   CSV/JSON artifacts.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory; the `probsarah` binary is a thin command-line front end.

// `!(x > 0.0)` is how NaN inputs get rejected alongside non-positive ones
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod concentration;
pub mod data;
pub mod error;
pub mod harness;
pub mod objective;
pub mod optimizer;
pub mod rng;
pub mod schedule;

mod exact;
mod linalg;

pub use error::{Error, Result};

/// `C_e = Σ_{i≥1} i⁻² = π²/6`, the normaliser of the per-outer-iteration
/// confidence split `δ′_j = δ / (4 C_e j⁴)`.
pub const C_E: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
