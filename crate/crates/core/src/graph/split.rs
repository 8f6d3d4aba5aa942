use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Edge, Graph};
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

/// Train/validation/test partition of a graph's edges, with sampled
/// non-edges matching the validation and test sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train_edges: Vec<Edge>,
    pub val_edges: Vec<Edge>,
    pub test_edges: Vec<Edge>,
    pub val_nonedges: Vec<(usize, usize)>,
    pub test_nonedges: Vec<(usize, usize)>,
    pub seed: u64,
}

impl EdgeSplit {
    /// Validation pairs as `(src, dst, label)`, edges first.
    pub fn val_pairs(&self) -> Vec<(usize, usize, bool)> {
        labeled(&self.val_edges, &self.val_nonedges)
    }

    pub fn test_pairs(&self) -> Vec<(usize, usize, bool)> {
        labeled(&self.test_edges, &self.test_nonedges)
    }
}

fn labeled(edges: &[Edge], nonedges: &[(usize, usize)]) -> Vec<(usize, usize, bool)> {
    edges
        .iter()
        .map(|e| (e.src, e.dst, true))
        .chain(nonedges.iter().map(|&(u, v)| (u, v, false)))
        .collect()
}

const RETRIES_PER_PAIR: usize = 100;

/// Randomly partition the edges of `graph`.
///
/// Validation and test sizes are `round(p * |E|)`. Non-edges are distinct
/// node pairs (no self-pairs) absent from the graph, sampled uniformly.
pub fn split_edges(graph: &Graph, p_val: f64, p_test: f64, seed: u64) -> Result<EdgeSplit> {
    if !(0.0..1.0).contains(&p_val) || !(0.0..1.0).contains(&p_test) || p_val + p_test >= 1.0 {
        return Err(Error::Config(format!(
            "split fractions must be non-negative with p_val + p_test < 1 (got {p_val}, {p_test})"
        )));
    }
    let m = graph.edge_count();
    let n_val = (p_val * m as f64).round() as usize;
    let n_test = (p_test * m as f64).round() as usize;

    let mut rng = substream(seed, Stream::Splits, 0, 0);
    let mut edges = graph.edges().to_vec();
    edges.shuffle(&mut rng);
    let val_edges = edges[..n_val].to_vec();
    let test_edges = edges[n_val..n_val + n_test].to_vec();
    let train_edges = edges[n_val + n_test..].to_vec();

    let wanted = n_val + n_test;
    let nonedges = sample_nonedges(graph, wanted, &mut rng)?;
    let (val_nonedges, test_nonedges) = nonedges.split_at(n_val);

    Ok(EdgeSplit {
        train_edges,
        val_edges,
        test_edges,
        val_nonedges: val_nonedges.to_vec(),
        test_nonedges: test_nonedges.to_vec(),
        seed,
    })
}

fn sample_nonedges(graph: &Graph, wanted: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if wanted == 0 {
        return Ok(Vec::new());
    }
    let n = graph.node_count();
    let mut out = Vec::with_capacity(wanted);
    let mut seen = HashSet::new();
    if n < 2 {
        return Err(Error::TooDense { found: 0, wanted });
    }
    let key = |u: usize, v: usize| {
        if graph.is_directed() || u < v {
            (u, v)
        } else {
            (v, u)
        }
    };
    for _ in 0..wanted.saturating_mul(RETRIES_PER_PAIR) {
        if out.len() == wanted {
            break;
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || graph.has_edge(u, v) || (!graph.is_directed() && graph.has_edge(v, u)) {
            continue;
        }
        if seen.insert(key(u, v)) {
            out.push((u, v));
        }
    }
    if out.len() < wanted {
        return Err(Error::TooDense { found: out.len(), wanted });
    }
    Ok(out)
}
