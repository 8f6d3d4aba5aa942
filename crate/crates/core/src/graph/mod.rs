//! Adjacency-list graphs and the queries the embedding methods need.

mod io;
mod kg;
mod split;
mod temporal;

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

pub use io::{load_attributes, load_edge_list, load_labels, write_edge_list};
pub use kg::{load_triples, KnowledgeTriples, Triple};
pub use split::{split_edges, EdgeSplit};
pub use temporal::{
    is_temporally_valid_walk, load_snapshot_dir, load_temporal_edges, SnapshotSequence,
    TemporalEdge, TemporalGraph,
};

/// Bidirectional table between external string ids and dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity map `"0" .. "n-1"`.
    pub fn sequential(n: usize) -> Self {
        let mut map = Self::new();
        for i in 0..n {
            map.intern(&i.to_string());
        }
        map
    }

    /// Returns the dense index of `name`, assigning the next free one if unseen.
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Sparse `|V| x D` attribute matrix stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Attributes {
    dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl Attributes {
    /// Rows are sorted by column with duplicate columns summed.
    pub fn new(dim: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                if c >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: c + 1 });
                }
                if !v.is_finite() {
                    return Err(Error::Validation(format!("non-finite attribute at column {c}")));
                }
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            out.push(merged);
        }
        Ok(Self { dim, rows: out })
    }

    /// One-hot identity rows, used when a graph carries no attributes.
    pub fn identity(n: usize) -> Self {
        Self {
            dim: n,
            rows: (0..n).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &(c, x) in &self.rows[i] {
            v[c] = x;
        }
        v
    }
}

/// Immutable adjacency-list graph.
///
/// Undirected graphs record each logical edge once in [`Graph::edges`] and
/// expose it from both endpoints in [`Graph::neighbors`]. Neighbor lists are
/// sorted by node id.
#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    weighted: bool,
    ids: IdMap,
    adjacency: Vec<Vec<(usize, f64)>>,
    edges: Vec<Edge>,
    attributes: Option<Attributes>,
    labels: Option<Vec<usize>>,
}

/// Accumulates nodes and edges; duplicate edges have their weights summed.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    directed: bool,
    weighted: bool,
    ids: IdMap,
    edges: Vec<Edge>,
    slot: HashMap<(usize, usize), usize>,
}

impl GraphBuilder {
    pub fn new(directed: bool, weighted: bool) -> Self {
        Self::with_ids(IdMap::new(), directed, weighted)
    }

    /// Start from an existing id table; its nodes are kept even if edgeless.
    pub fn with_ids(ids: IdMap, directed: bool, weighted: bool) -> Self {
        Self {
            directed,
            weighted,
            ids,
            edges: Vec::new(),
            slot: HashMap::new(),
        }
    }

    pub fn node(&mut self, name: &str) -> usize {
        self.ids.intern(name)
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, weight: f64) -> Result<()> {
        let n = self.ids.len();
        if src >= n {
            return Err(Error::InvalidNode(src));
        }
        if dst >= n {
            return Err(Error::InvalidNode(dst));
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::Validation(format!(
                "edge ({src}, {dst}) has non-positive weight {weight}"
            )));
        }
        let key = if self.directed || src <= dst { (src, dst) } else { (dst, src) };
        match self.slot.get(&key) {
            Some(&i) => self.edges[i].weight += weight,
            None => {
                self.slot.insert(key, self.edges.len());
                self.edges.push(Edge { src, dst, weight });
            }
        }
        Ok(())
    }

    pub fn build(self) -> Graph {
        let n = self.ids.len();
        let mut adjacency = vec![Vec::new(); n];
        for e in &self.edges {
            adjacency[e.src].push((e.dst, e.weight));
            if !self.directed && e.src != e.dst {
                adjacency[e.dst].push((e.src, e.weight));
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Graph {
            directed: self.directed,
            weighted: self.weighted,
            ids: self.ids,
            adjacency,
            edges: self.edges,
            attributes: None,
            labels: None,
        }
    }
}

impl Graph {
    /// Graph over nodes `0..n` with sequential external ids.
    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let weighted = edges.iter().any(|e| e.2 != 1.0);
        let mut b = GraphBuilder::with_ids(IdMap::sequential(n), directed, weighted);
        for &(u, v, w) in edges {
            b.add_edge(u, v, w)?;
        }
        Ok(b.build())
    }

    /// Unit-weight graph over nodes `0..n`.
    pub fn from_pairs(n: usize, directed: bool, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges: Vec<_> = pairs.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::from_edges(n, directed, &edges)
    }

    /// Same nodes, ids, attributes and labels, but only `edges`.
    pub fn with_edge_subset(&self, edges: &[Edge]) -> Result<Self> {
        let mut b = GraphBuilder::with_ids(self.ids.clone(), self.directed, self.weighted);
        for e in edges {
            b.add_edge(e.src, e.dst, e.weight)?;
        }
        let mut g = b.build();
        g.attributes = self.attributes.clone();
        g.labels = self.labels.clone();
        Ok(g)
    }

    pub fn with_attributes(mut self, attributes: Attributes) -> Result<Self> {
        if attributes.rows.len() != self.node_count() {
            return Err(Error::DimensionMismatch {
                expected: self.node_count(),
                got: attributes.rows.len(),
            });
        }
        self.attributes = Some(attributes);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::DimensionMismatch {
                expected: self.node_count(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Logical edge count (undirected edges counted once).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn ids(&self) -> &IdMap {
        &self.ids
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|&(_, w)| w).sum()
    }

    /// Position of `v` in the neighbor list of `u`.
    pub fn neighbor_index(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency[u].binary_search_by_key(&v, |&(x, _)| x).ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbor_index(u, v).is_some()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        self.neighbor_index(u, v).map(|i| self.adjacency[u][i].1)
    }

    pub fn attributes(&self) -> Option<&Attributes> {
        self.attributes.as_ref()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode(v))
        }
    }

    /// Unweighted BFS hop counts from `source` along out-edges.
    pub fn bfs_distances(&self, source: usize) -> Result<Vec<Option<usize>>> {
        self.check_node(source)?;
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0) + 1;
            for &(v, _) in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// Hop count from `i` to `j`, or `None` when `j` is unreachable.
    pub fn shortest_path_length(&self, i: usize, j: usize) -> Result<Option<usize>> {
        self.check_node(j)?;
        Ok(self.bfs_distances(i)?[j])
    }

    /// Nodes grouped by clamped hop distance `min(sp, max_hops)` from `source`.
    ///
    /// Unreachable nodes are left out entirely.
    pub fn k_hop_neighborhoods(&self, source: usize, max_hops: usize) -> Result<HopSets> {
        if max_hops == 0 {
            return Err(Error::Config("hop count K must be at least 1".into()));
        }
        let dist = self.bfs_distances(source)?;
        let mut sets = vec![Vec::new(); max_hops];
        for (j, d) in dist.into_iter().enumerate() {
            match d {
                Some(d) if j != source => sets[d.min(max_hops) - 1].push(j),
                _ => {}
            }
        }
        Ok(HopSets { sets })
    }
}

/// Hop buckets `1..=K` produced by [`Graph::k_hop_neighborhoods`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopSets {
    sets: Vec<Vec<usize>>,
}

impl HopSets {
    pub fn max_hops(&self) -> usize {
        self.sets.len()
    }

    /// Sorted nodes at hop `k` (1-based); empty outside `1..=K`.
    pub fn hop(&self, k: usize) -> &[usize] {
        if k == 0 || k > self.sets.len() {
            return &[];
        }
        &self.sets[k - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.sets.iter().enumerate().map(|(i, s)| (i + 1, s.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> Graph {
        Graph::from_pairs(4, false, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn k_hop_on_path() {
        let h = path4().k_hop_neighborhoods(0, 3).unwrap();
        assert_eq!(h.hop(1), &[1]);
        assert_eq!(h.hop(2), &[2]);
        assert_eq!(h.hop(3), &[3]);
    }

    #[test]
    fn k_hop_clamps_far_nodes_into_last_bucket() {
        let h = path4().k_hop_neighborhoods(0, 2).unwrap();
        assert_eq!(h.hop(1), &[1]);
        assert_eq!(h.hop(2), &[2, 3]);
    }

    #[test]
    fn isolated_source_has_empty_buckets() {
        let g = Graph::from_pairs(3, false, &[(1, 2)]).unwrap();
        let h = g.k_hop_neighborhoods(0, 2).unwrap();
        assert!(h.iter().all(|(_, s)| s.is_empty()));
    }

    #[test]
    fn unreachable_nodes_are_excluded() {
        let g = Graph::from_pairs(4, false, &[(0, 1), (2, 3)]).unwrap();
        let h = g.k_hop_neighborhoods(0, 2).unwrap();
        assert_eq!(h.hop(1), &[1]);
        assert!(h.hop(2).is_empty());
    }

    #[test]
    fn k_hop_rejects_bad_input() {
        assert!(path4().k_hop_neighborhoods(9, 2).is_err());
        assert!(path4().k_hop_neighborhoods(0, 0).is_err());
    }

    #[test]
    fn shortest_paths() {
        let g = Graph::from_pairs(5, false, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(g.shortest_path_length(0, 0).unwrap(), Some(0));
        assert_eq!(g.shortest_path_length(0, 2).unwrap(), Some(2));
        assert_eq!(g.shortest_path_length(0, 4).unwrap(), None);
        assert!(g.shortest_path_length(0, 7).is_err());
    }

    #[test]
    fn duplicate_edges_sum_weights() {
        let g = Graph::from_edges(2, false, &[(0, 1, 1.0), (1, 0, 2.5)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(3.5));
        assert_eq!(g.edge_weight(1, 0), Some(3.5));
    }

    #[test]
    fn directed_edges_are_one_way() {
        let g = Graph::from_pairs(3, true, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(1, 2));
        assert!(!g.has_edge(2, 1));
    }

    #[test]
    fn self_loop_counts_once() {
        let g = Graph::from_pairs(2, false, &[(0, 0), (0, 1)]).unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 1);
    }

    #[test]
    fn rejects_non_positive_weight() {
        assert!(Graph::from_edges(2, false, &[(0, 1, 0.0)]).is_err());
        assert!(Graph::from_edges(2, false, &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn attribute_rows_must_match_nodes() {
        let g = path4();
        let attrs = Attributes::new(3, vec![vec![(0, 1.0)]; 3]).unwrap();
        assert!(g.with_attributes(attrs).is_err());
    }
}
