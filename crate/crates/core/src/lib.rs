//! Simulation library for slow-mixing single-site Markov chains.
//!
//! The crate is organised around five layers:
//!
//! * [`models`]: problem instances (graphs, Ising interaction operators,
//!   spiked Wigner matrices, two-community stochastic block models).
//! * [`chains`]: hardcore and Ising Glauber dynamics with incremental caches,
//!   restricted Gaussian dynamics and a generic seeded chain runner.
//! * [`exact`]: brute-force measures, kernels, divergences and Dirichlet forms
//!   on enumerable state spaces (`n <= 20`).
//! * [`diagnostics`]: observables, score functions and batch-means statistics.
//! * [`experiments`]: scenario runners and the exact oracle suite.
//!
//! All randomness is derived from a single 64-bit seed through
//! [`rng::stream_rng`], one counter-based stream per instance or replica.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chains;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod models;
pub mod rng;

pub use error::{Error, Result};
