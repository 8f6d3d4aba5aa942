use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, HopSets};
use crate::rng::{substream, Stream};

/// Anchor with a closer (positive) and a farther (negative) node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triplet {
    pub anchor: usize,
    pub positive: usize,
    pub pos_hop: usize,
    pub negative: usize,
    pub neg_hop: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletSet {
    pub triplets: Vec<Triplet>,
    pub max_hops: usize,
    pub seed: u64,
}

/// Clamped hop buckets of every node, computed once per graph.
#[derive(Debug, Clone)]
pub struct HopIndex {
    sets: Vec<HopSets>,
    max_hops: usize,
}

impl HopIndex {
    pub fn new(graph: &Graph, max_hops: usize) -> Result<Self> {
        if max_hops < 2 {
            return Err(Error::Config("triplet sampling needs K >= 2".into()));
        }
        let sets = (0..graph.node_count())
            .into_par_iter()
            .map(|v| graph.k_hop_neighborhoods(v, max_hops))
            .collect::<Result<Vec<_>>>()?;
        let index = Self { sets, max_hops };
        if !index.sets.iter().any(|s| s.iter().filter(|(_, b)| !b.is_empty()).count() >= 2) {
            return Err(Error::Empty("no node has two non-empty hop buckets".into()));
        }
        Ok(index)
    }

    pub fn max_hops(&self) -> usize {
        self.max_hops
    }

    pub fn hops(&self, v: usize) -> &HopSets {
        &self.sets[v]
    }

    /// `rounds` rounds per anchor: draw one node from every non-empty
    /// bucket, then emit every pair of draws with `k < l`. Different
    /// `pass` values give independent samples under the same seed.
    pub fn sample(&self, rounds: usize, seed: u64, pass: u64) -> TripletSet {
        let triplets = (0..self.sets.len())
            .into_par_iter()
            .flat_map_iter(|anchor| {
                let mut rng = substream(seed, Stream::Triplets, anchor as u64, pass);
                let hops = &self.sets[anchor];
                let mut out = Vec::new();
                for _ in 0..rounds {
                    let picks: Vec<(usize, usize)> = hops
                        .iter()
                        .filter_map(|(k, bucket)| bucket.choose(&mut rng).map(|&j| (k, j)))
                        .collect();
                    for (a, &(k, pos)) in picks.iter().enumerate() {
                        for &(l, neg) in &picks[a + 1..] {
                            out.push(Triplet { anchor, positive: pos, pos_hop: k, negative: neg, neg_hop: l });
                        }
                    }
                }
                out
            })
            .collect();
        TripletSet { triplets, max_hops: self.max_hops, seed }
    }
}

/// Sample hop-ordered triplets from `graph`; see [`HopIndex::sample`].
pub fn sample_triplets(graph: &Graph, max_hops: usize, per_anchor: usize, seed: u64) -> Result<TripletSet> {
    Ok(HopIndex::new(graph, max_hops)?.sample(per_anchor, seed, 0))
}
