//! Vital node identification on undirected graphs.
//!
//! The crate bundles the full learning pipeline (collective node features,
//! representative sampling, an RBF ε-SVR and the neighbour-extended score),
//! the SIR Monte-Carlo simulator used to produce ground-truth vitalities,
//! classical centrality baselines and rank-quality metrics.

pub mod baselines;
pub mod decomposition;
pub mod eml;
pub mod error;
pub mod features;
pub mod generators;
pub mod graph;
pub mod metrics;
#[cfg(any(test, feature = "oracles"))]
pub mod oracles;
pub mod ranking;
pub mod regression;
pub mod rng;
pub mod sampling;
pub mod sir;

pub use error::{Error, Result};
pub use graph::{Graph, GraphStats};
pub use ranking::Ranking;
