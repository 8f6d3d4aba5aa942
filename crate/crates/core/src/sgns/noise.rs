use rand::Rng;

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Noise distribution over nodes proportional to `frequency^exponent`.
///
/// The alias table is laid out in `order`, so two samplers built from
/// permuted inputs with matching orders draw the same nodes from the same
/// random stream.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    table: AliasTable,
    order: Vec<usize>,
}

impl NoiseSampler {
    pub fn from_frequencies(freqs: &[f64], exponent: f64) -> Result<Self> {
        let order: Vec<usize> = (0..freqs.len()).collect();
        Self::with_order(freqs, exponent, order)
    }

    /// `order[i]` is the node placed in alias slot `i`.
    pub fn with_order(freqs: &[f64], exponent: f64, order: Vec<usize>) -> Result<Self> {
        if !(0.0..=1.0).contains(&exponent) {
            return Err(Error::Config(format!("noise exponent {exponent} outside [0, 1]")));
        }
        if freqs.is_empty() {
            return Err(Error::Empty("noise distribution".into()));
        }
        let mut w: Vec<f64> = order.iter().map(|&v| freqs[v].max(0.0).powf(exponent)).collect();
        if w.iter().all(|&x| x == 0.0) {
            w.iter_mut().for_each(|x| *x = 1.0);
        }
        let table = AliasTable::new(&w).ok_or_else(|| Error::Validation("invalid noise weights".into()))?;
        Ok(Self { table, order })
    }

    /// Degree-based noise: weighted degree raised to `exponent`.
    pub fn from_graph(graph: &Graph, exponent: f64) -> Result<Self> {
        let deg: Vec<f64> = (0..graph.node_count()).map(|v| graph.weighted_degree(v)).collect();
        Self::from_frequencies(&deg, exponent)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.order[self.table.sample(rng)]
    }

    /// Sampling probability of every node.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.order.len()];
        for (slot, q) in self.table.distribution().into_iter().enumerate() {
            p[self.order[slot]] = q;
        }
        p
    }
}

/// Draw `k` i.i.d. nodes with probability proportional to `degree^exponent`.
pub fn negative_sample<R: Rng + ?Sized>(graph: &Graph, exponent: f64, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    let sampler = NoiseSampler::from_graph(graph, exponent)?;
    Ok((0..k).map(|_| sampler.sample(rng)).collect())
}
