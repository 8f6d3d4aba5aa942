//! First- and second-order random walks.
//!
//! A walk moves from `cur` to a neighbor `x` with unnormalized mass
//! `alpha(prev, x) * w(cur, x)`, where `alpha` is `1/p` for returning to
//! `prev`, `1` for neighbors of `prev` and `1/q` otherwise. The first step of
//! a walk has no previous node and is weight-proportional. With `p = q = 1`
//! the walk is the plain weighted random walk.

use std::io::Write;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::graph::{Graph, IdMap};
use crate::rng::{substream, Rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Walks started from every node.
    pub num_walks: usize,
    /// Maximum number of nodes in a walk.
    pub walk_length: usize,
    pub window: usize,
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            num_walks: 10,
            walk_length: 80,
            window: 10,
            p: 1.0,
            q: 1.0,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_walks == 0 || self.walk_length == 0 || self.window == 0 {
            return Err(Error::Config("num_walks, walk_length and window must be >= 1".into()));
        }
        check_pq(self.p, self.q)
    }
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite() && q > 0.0 && q.is_finite()) {
        return Err(Error::Config(format!("p and q must be positive (got p={p}, q={q})")));
    }
    Ok(())
}

/// Alias tables for first steps (per node) and biased steps (per arc
/// `prev -> cur`). Arc tables are built on first use, exactly once.
#[derive(Debug)]
pub struct TransitionTable<'g> {
    graph: &'g Graph,
    p: f64,
    q: f64,
    first: Vec<Option<AliasTable>>,
    offsets: Vec<usize>,
    arcs: Vec<OnceLock<Option<AliasTable>>>,
}

/// Build the walk transition tables for `graph`.
pub fn preprocess_transition_probs(graph: &Graph, p: f64, q: f64) -> Result<TransitionTable<'_>> {
    check_pq(p, q)?;
    let n = graph.node_count();
    let first = (0..n)
        .map(|v| {
            let w: Vec<f64> = graph.neighbors(v).iter().map(|&(_, w)| w).collect();
            AliasTable::new(&w)
        })
        .collect();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut total = 0;
    for v in 0..n {
        offsets.push(total);
        total += graph.degree(v);
    }
    offsets.push(total);
    let arcs = (0..total).map(|_| OnceLock::new()).collect();
    Ok(TransitionTable { graph, p, q, first, offsets, arcs })
}

impl<'g> TransitionTable<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Search-bias factor for stepping to `x` having arrived from `prev`.
    pub fn bias(&self, prev: usize, x: usize) -> f64 {
        if x == prev {
            1.0 / self.p
        } else if self.graph.has_edge(prev, x) {
            1.0
        } else {
            1.0 / self.q
        }
    }

    /// Unnormalized masses over `graph.neighbors(cur)`, in neighbor order.
    pub fn masses(&self, prev: usize, cur: usize) -> Vec<f64> {
        self.graph
            .neighbors(cur)
            .iter()
            .map(|&(x, w)| self.bias(prev, x) * w)
            .collect()
    }

    /// Exact normalized next-step distribution for context `(prev, cur)`.
    pub fn transition_probs(&self, prev: usize, cur: usize) -> Vec<(usize, f64)> {
        let m = self.masses(prev, cur);
        let z: f64 = m.iter().sum();
        self.graph
            .neighbors(cur)
            .iter()
            .zip(m)
            .map(|(&(x, _), mass)| (x, mass / z))
            .collect()
    }

    /// First-step table of `v` (weight-proportional); `None` for sinks.
    pub fn first_step_table(&self, v: usize) -> Option<&AliasTable> {
        self.first[v].as_ref()
    }

    /// Biased table for the arc `prev -> cur`; `None` if it is not an arc or `cur` is a sink.
    pub fn arc_table(&self, prev: usize, cur: usize) -> Option<&AliasTable> {
        let pos = self.graph.neighbor_index(prev, cur)?;
        self.arc_table_at(prev, cur, self.offsets[prev] + pos)
    }

    fn arc_table_at(&self, prev: usize, cur: usize, arc: usize) -> Option<&AliasTable> {
        self.arcs[arc]
            .get_or_init(|| AliasTable::new(&self.masses(prev, cur)))
            .as_ref()
    }

    /// One walk of at most `length` nodes starting at `start`.
    pub fn walk(&self, start: usize, length: usize, rng: &mut Rng) -> Vec<usize> {
        let mut walk = Vec::with_capacity(length);
        walk.push(start);
        if length < 2 {
            return walk;
        }
        let Some(table) = self.first_step_table(start) else {
            return walk;
        };
        let mut pos = table.sample(rng);
        let mut prev = start;
        let mut cur = self.graph.neighbors(start)[pos].0;
        walk.push(cur);
        while walk.len() < length {
            let arc = self.offsets[prev] + pos;
            let Some(table) = self.arc_table_at(prev, cur, arc) else {
                break;
            };
            pos = table.sample(rng);
            prev = cur;
            cur = self.graph.neighbors(cur)[pos].0;
            walk.push(cur);
        }
        walk
    }
}

/// Node sequences from [`simulate_walks`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<usize>>,
    pub config: WalkConfig,
}

/// Generate `num_walks` walks from every node.
///
/// Each pass visits start nodes in a freshly shuffled order. Every walk
/// draws from its own stream keyed by start node and pass, so the corpus
/// does not depend on thread scheduling.
pub fn simulate_walks(table: &TransitionTable<'_>, config: &WalkConfig) -> Result<WalkCorpus> {
    config.validate()?;
    let n = table.graph().node_count();
    let mut walks = Vec::with_capacity(n * config.num_walks);
    for pass in 0..config.num_walks {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut substream(config.seed, Stream::WalkOrder, pass as u64, 0));
        let batch: Vec<Vec<usize>> = order
            .par_iter()
            .map(|&start| {
                let mut rng = substream(config.seed, Stream::Walks, start as u64, pass as u64);
                table.walk(start, config.walk_length, &mut rng)
            })
            .collect();
        walks.extend(batch);
    }
    Ok(WalkCorpus { walks, config: *config })
}

impl WalkCorpus {
    pub fn context_pairs(&self, window: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        context_pairs(&self.walks, window)
    }

    pub fn is_empty(&self) -> bool {
        self.walks.iter().all(|w| w.is_empty())
    }

    /// One walk per line, space-separated external ids.
    pub fn write<W: Write>(&self, ids: &IdMap, mut out: W) -> Result<()> {
        for walk in &self.walks {
            let line: Vec<&str> = walk.iter().map(|&v| ids.name(v)).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// `(walk[i], walk[j])` for every `j != i` with `|i - j| <= window`.
pub fn context_pairs(walks: &[Vec<usize>], window: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    walks.iter().flat_map(move |walk| {
        (0..walk.len()).flat_map(move |i| {
            let lo = i.saturating_sub(window);
            let hi = (i + window + 1).min(walk.len());
            (lo..hi).filter(move |&j| j != i).map(move |j| (walk[i], walk[j]))
        })
    })
}
