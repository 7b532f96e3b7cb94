//! Monte Carlo null models for voting-bias and collusion detection in the
//! Eurovision Song Contest, 1957–2017.
//!
//! The pipeline is:
//!
//! 1. [`dataset`] loads one score matrix per contest year plus a region registry.
//! 2. [`schemes`] maps each year to its voting scheme and samples unbiased scores
//!    for a single giver/receiver pair. [`pmf`] gives the exact distribution of
//!    the same samplers and is used as an independent check.
//! 3. [`nullmodel`] averages per-year draws over a window of years and derives the
//!    upper-tail significance threshold.
//! 4. [`detector`] compares observed window means against the thresholds and
//!    classifies significant edges as one-way or collusive.
//! 5. [`network`] aggregates edges over a stepping sequence of windows and
//!    [`dot`] renders the result for graphviz.
//!
//! Pair-window computations fan out over rayon when the `parallel` feature is
//! enabled (the default). Every pair-window derives its own RNG seed, so
//! results do not depend on the execution mode or the worker count.

pub mod calibration;
pub mod dataset;
pub mod detector;
pub mod dot;
pub mod error;
pub mod exec;
pub mod network;
pub mod nullmodel;
pub mod pmf;
pub mod regions;
pub mod schemes;
pub mod seed;
pub mod synthetic;
pub mod verify;

pub use dataset::{load_dataset, participants, CountryId, Dataset, YearRecord};
pub use detector::{
    detect_pair, detect_window, observed_mean, BiasEdge, DetectConfig, EdgeKind, ObservedMean,
    Skip, WindowReport,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use network::{
    aggregate, reciprocity_ratio, AggregationMode, AggregationSpec, BiasNetwork, Reciprocity,
};
pub use nullmodel::{
    compute_threshold, sample_window_means, threshold_from_samples, NullConfig, NullThreshold,
    Pair, WindowSpec,
};
pub use pmf::{convolve_years, ScorePmf};
pub use regions::{Region, RegionRegistry};
pub use schemes::{exact_null_pmf, sample_score, scheme_for_year, VotingScheme};

/// First contest year covered by the dataset. 1956 is excluded.
pub const FIRST_YEAR: u16 = 1957;
/// Last contest year covered by the dataset.
pub const LAST_YEAR: u16 = 2017;
