//! Similarity measures, downstream evaluation tasks, projection, variance
//! analysis, and snapshot stability.

mod classify;
mod cluster;
mod linkpred;
mod project;
mod similarity;
mod stability;
mod uncertainty;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use classify::{f1_scores, node_classification, ClassifyConfig, F1Scores, LogisticRegression};
pub use cluster::{kmeans, kmeans_restarts, nmi_and_accuracy, silhouette, Agreement, KMeans, DEFAULT_RESTARTS};
pub use linkpred::{link_prediction, score_pairs_gaussian, score_pairs_point, LinkScores};
pub use project::{pca_project, Projection};
pub use similarity::{similarity, SimilarityKind};
pub use stability::{relative_stability, snapshot_stability, stability_constant, StabilityReport};
pub use uncertainty::{intrinsic_dimension_estimate, uncertainty_per_dimension, IntrinsicDimension, UncertaintyCurves};

/// Metrics of one evaluation run, serialized as JSON with sorted keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: String,
    pub metrics: BTreeMap<String, f64>,
    pub seeds: Vec<u64>,
    pub config: serde_json::Value,
    /// SHA-256 of the compact JSON encoding of `config`
    pub config_digest: String,
}

impl MetricsReport {
    pub fn new(task: impl Into<String>, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        let digest = Sha256::digest(config.to_string().as_bytes());
        let config_digest = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self { task: task.into(), metrics: BTreeMap::new(), seeds, config, config_digest }
    }

    /// Record a metric; rejects non-finite values and values outside the
    /// known range of the named metric.
    pub fn insert(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Validation(format!("metric {name} is not finite: {value}")));
        }
        let range = match name {
            "auc" | "ap" | "f1_micro" | "f1_macro" | "nmi" | "accuracy" => Some((0.0, 1.0)),
            "silhouette" => Some((-1.0, 1.0)),
            _ => None,
        };
        if let Some((lo, hi)) = range {
            if !(lo..=hi).contains(&value) {
                return Err(Error::Validation(format!("metric {name} = {value} outside [{lo}, {hi}]")));
            }
        }
        self.metrics.insert(name.to_string(), value);
        Ok(())
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::Validation(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }
}
