//! Stability constant of embeddings across graph snapshots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, SnapshotSequence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// relative stability of each transition `t -> t+1`
    pub ratios: Vec<f64>,
    /// largest absolute difference between any two ratios
    pub constant: f64,
}

fn frobenius(rows: &[Vec<f64>]) -> f64 {
    rows.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

fn frobenius_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        acc += x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
    }
    Ok(acc.sqrt())
}

/// Relative embedding change over relative adjacency change between two
/// snapshots, all matrices restricted to the same node set.
pub fn relative_stability(
    f_t: &[Vec<f64>],
    f_next: &[Vec<f64>],
    s_t: &[Vec<f64>],
    s_next: &[Vec<f64>],
) -> Result<f64> {
    let (fe, se) = (frobenius(f_t), frobenius(s_t));
    if fe == 0.0 || se == 0.0 {
        return Err(Error::UndefinedStability("zero embedding or adjacency norm".into()));
    }
    let ds = frobenius_diff(s_next, s_t)?;
    if ds == 0.0 {
        return Err(Error::UndefinedStability("adjacency unchanged between snapshots".into()));
    }
    Ok((frobenius_diff(f_next, f_t)? / fe) / (ds / se))
}

/// `max |S_r(a) - S_r(b)|` over all transition pairs.
pub fn stability_constant(ratios: &[f64]) -> Result<f64> {
    if ratios.len() < 2 {
        return Err(Error::Validation("stability constant needs at least two transitions".into()));
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

fn dense_adjacency(g: &Graph, nodes: &[usize]) -> Vec<Vec<f64>> {
    nodes.iter().map(|&u| nodes.iter().map(|&v| g.edge_weight(u, v).unwrap_or(0.0)).collect()).collect()
}

/// Stability over a snapshot sequence. `embeddings[t][v]` is the vector of
/// union node `v` at snapshot `t`. Transition `t -> t+1` uses only the
/// nodes present at `t`; nodes first seen at `t+1` are ignored.
pub fn snapshot_stability(seq: &SnapshotSequence, embeddings: &[Vec<Option<Vec<f64>>>]) -> Result<StabilityReport> {
    if seq.len() < 3 {
        return Err(Error::Validation(format!("need at least 3 snapshots, got {}", seq.len())));
    }
    if embeddings.len() != seq.len() {
        return Err(Error::DimensionMismatch { expected: seq.len(), got: embeddings.len() });
    }
    let rows = |t: usize, nodes: &[usize]| -> Result<Vec<Vec<f64>>> {
        nodes
            .iter()
            .map(|&v| {
                embeddings[t].get(v).cloned().flatten().ok_or_else(|| {
                    Error::Validation(format!("node {} has no embedding in snapshot {}", seq.ids().name(v), seq.label(t)))
                })
            })
            .collect()
    };
    let mut ratios = Vec::with_capacity(seq.len() - 1);
    for t in 0..seq.len() - 1 {
        let nodes = seq.nodes_present(t);
        let r = relative_stability(
            &rows(t, &nodes)?,
            &rows(t + 1, &nodes)?,
            &dense_adjacency(seq.snapshot(t), &nodes),
            &dense_adjacency(seq.snapshot(t + 1), &nodes),
        )
        .map_err(|e| match e {
            Error::UndefinedStability(m) => Error::UndefinedStability(format!("transition {t}: {m}")),
            other => other,
        })?;
        ratios.push(r);
    }
    let constant = stability_constant(&ratios)?;
    Ok(StabilityReport { ratios, constant })
}
