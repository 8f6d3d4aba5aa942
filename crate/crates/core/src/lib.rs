//! Graph embeddings: biased random walks with skip-gram training, LINE,
//! Gaussian node embeddings with energy-ranking losses, and the metrics
//! used to evaluate them.

pub mod alias;
pub mod error;
pub mod eval;
pub mod gauss;
pub mod graph;
pub mod rng;
pub mod sgns;
pub mod walks;

pub use error::{Error, Result};
