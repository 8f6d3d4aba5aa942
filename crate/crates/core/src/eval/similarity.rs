use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityKind {
    Dot,
    Cosine,
    Euclidean,
}

/// Similarity between two point embeddings. For `Euclidean` the value is
/// a distance, so smaller means closer.
pub fn similarity(z_i: &[f64], z_j: &[f64], kind: SimilarityKind) -> Result<f64> {
    if z_i.len() != z_j.len() {
        return Err(Error::DimensionMismatch { expected: z_i.len(), got: z_j.len() });
    }
    let dot = || z_i.iter().zip(z_j).map(|(a, b)| a * b).sum::<f64>();
    let norm = |z: &[f64]| z.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(match kind {
        SimilarityKind::Dot => dot(),
        SimilarityKind::Cosine => {
            let (a, b) = (norm(z_i), norm(z_j));
            if a == 0.0 || b == 0.0 {
                return Err(Error::Validation("cosine similarity of a zero vector".into()));
            }
            dot() / (a * b)
        }
        SimilarityKind::Euclidean => z_i.iter().zip(z_j).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
    })
}
