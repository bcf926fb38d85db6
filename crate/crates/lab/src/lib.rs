//! Finite-size side of the limit theorems: sampled correlated matrix
//! ensembles, matrix-polynomial evaluation, normalized trace moments,
//! spectra, and replicate-based Monte-Carlo estimates.
//!
//! Everything is deterministic given an [`EnsembleConfig`]: replicate `r`
//! draws from an independent substream derived from the root seed with a
//! SplitMix64 finalizer, and aggregation reduces in replicate order, so
//! results do not depend on thread count.

pub mod config;
pub mod sample;
pub mod spectrum;
pub mod trace;

pub use config::{Dist, EnsembleConfig, Error, FamilySpec, Regime, Result};
pub use sample::{
    centered_scaled, cross_covariance, replicate_seed, sample_pair, MatrixFamily, Replicate,
};
pub use spectrum::{esd_moments, histogram, spectrum, HistBin, SpectralSample, SpectrumKind};
pub use trace::{
    eval_matrix_poly, map_replicates, monte_carlo_poly_moments, monte_carlo_word_moment,
    summarize, trace_moments, word_matrix, MomentEstimate,
};
