//! Differentially private synthetic graphs for Laplacian spectra and cuts,
//! with exact small-scale oracles.

// `!(x > 0.0)` is how parameter checks reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod cut;
pub mod dp;
pub mod error;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod mirror;
pub mod sampler;
pub mod spectral;
pub mod topology;

pub use error::{Error, Result};

/// Generator behind every seeded entry point.
pub type ReleaseRng = rand_chacha::ChaCha20Rng;
