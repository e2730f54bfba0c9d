//! Observables, score functions and batch-means statistics over trajectories.
//!
//! Nothing here needs access to densities, so every probe applies at any
//! scale.

mod observables;
mod score;
mod stats;

pub use observables::{Normalization, ObservableKind, ObservableRegistry, ObservableSpec};
pub use score::{conditional_score_expectation, score_average, score_phi};
pub use stats::{
    batch_means_half_width, stability_probe, summarize, summarize_series, ObservableSummary, ProbeResult,
    DEFAULT_BATCHES,
};
