use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::io::{data_lines, parse_f64};
use super::{Graph, GraphBuilder, IdMap};
use crate::error::{parse_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalEdge {
    pub src: usize,
    pub dst: usize,
    pub time: f64,
}

/// Continuous-time graph: a stream of timestamped edges.
#[derive(Debug, Clone)]
pub struct TemporalGraph {
    directed: bool,
    ids: IdMap,
    edges: Vec<TemporalEdge>,
    times: HashMap<(usize, usize), Vec<f64>>,
}

impl TemporalGraph {
    pub fn new(ids: IdMap, directed: bool, edges: Vec<TemporalEdge>) -> Result<Self> {
        let mut times: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
        for e in &edges {
            for v in [e.src, e.dst] {
                if v >= ids.len() {
                    return Err(Error::InvalidNode(v));
                }
            }
            if !e.time.is_finite() || e.time < 0.0 {
                return Err(Error::Validation(format!("invalid edge time {}", e.time)));
            }
            times.entry((e.src, e.dst)).or_default().push(e.time);
        }
        Ok(Self { directed, ids, edges, times })
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &IdMap {
        &self.ids
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn has_edge_at(&self, src: usize, dst: usize, time: f64) -> bool {
        let hit = |k| self.times.get(&k).is_some_and(|ts| ts.contains(&time));
        hit((src, dst)) || (!self.directed && hit((dst, src)))
    }
}

/// Read `src dst time` lines.
pub fn load_temporal_edges<R: BufRead>(reader: R, directed: bool) -> Result<TemporalGraph> {
    let mut ids = IdMap::new();
    let mut edges = Vec::new();
    for item in data_lines(reader) {
        let (line, fields) = item?;
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected 3 columns, found {}", fields.len())));
        }
        let time = parse_f64(line, &fields[2], "time")?;
        if !time.is_finite() || time < 0.0 {
            return Err(Error::Validation(format!("line {line}: invalid edge time {time}")));
        }
        let src = ids.intern(&fields[0]);
        let dst = ids.intern(&fields[1]);
        edges.push(TemporalEdge { src, dst, time });
    }
    TemporalGraph::new(ids, directed, edges)
}

/// Whether a timed walk respects time order.
///
/// `walk[i] = (node, arrival time)`; the time of the first entry is ignored.
/// Each step must be an edge of `tg` at its arrival time, otherwise
/// [`Error::NotTemporalEdge`] is returned. Ties in time are allowed.
pub fn is_temporally_valid_walk(tg: &TemporalGraph, walk: &[(usize, f64)]) -> Result<bool> {
    if walk.is_empty() {
        return Err(Error::Empty("walk".into()));
    }
    for &(v, _) in walk {
        if v >= tg.node_count() {
            return Err(Error::InvalidNode(v));
        }
    }
    for pair in walk.windows(2) {
        let (src, _) = pair[0];
        let (dst, time) = pair[1];
        if !tg.has_edge_at(src, dst, time) {
            return Err(Error::NotTemporalEdge { src, dst, time });
        }
    }
    Ok(walk[1..].windows(2).all(|w| w[0].1 <= w[1].1))
}

/// Ordered static snapshots over one shared id space.
#[derive(Debug, Clone)]
pub struct SnapshotSequence {
    ids: IdMap,
    snapshots: Vec<Graph>,
    labels: Vec<String>,
    present: Vec<Vec<bool>>,
}

impl SnapshotSequence {
    /// Build from per-snapshot edge lists given in external ids.
    pub fn from_edge_lists(
        directed: bool,
        weighted: bool,
        lists: Vec<(String, Vec<(String, String, f64)>)>,
    ) -> Result<Self> {
        let mut ids = IdMap::new();
        for (_, edges) in &lists {
            for (s, d, _) in edges {
                ids.intern(s);
                ids.intern(d);
            }
        }
        let mut snapshots = Vec::with_capacity(lists.len());
        let mut labels = Vec::with_capacity(lists.len());
        let mut present = Vec::with_capacity(lists.len());
        for (label, edges) in lists {
            let mut b = GraphBuilder::with_ids(ids.clone(), directed, weighted);
            let mut here = vec![false; ids.len()];
            for (s, d, w) in &edges {
                let (s, d) = (b.node(s), b.node(d));
                here[s] = true;
                here[d] = true;
                b.add_edge(s, d, *w)?;
            }
            snapshots.push(b.build());
            labels.push(label);
            present.push(here);
        }
        Ok(Self { ids, snapshots, labels, present })
    }

    pub fn ids(&self) -> &IdMap {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshot(&self, t: usize) -> &Graph {
        &self.snapshots[t]
    }

    pub fn snapshots(&self) -> &[Graph] {
        &self.snapshots
    }

    pub fn label(&self, t: usize) -> &str {
        &self.labels[t]
    }

    /// Nodes incident to at least one edge of snapshot `t`.
    pub fn nodes_present(&self, t: usize) -> Vec<usize> {
        (0..self.ids.len()).filter(|&v| self.present[t][v]).collect()
    }
}

/// Load every regular file in `dir` as one snapshot, in lexicographic file-name order.
pub fn load_snapshot_dir(dir: &Path, directed: bool, weighted: bool) -> Result<SnapshotSequence> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut lists = Vec::with_capacity(paths.len());
    for path in paths {
        let reader = BufReader::new(File::open(&path)?);
        let mut edges = Vec::new();
        for item in data_lines(reader) {
            let (line, fields) = item?;
            let w = match fields.len() {
                2 => 1.0,
                3 => parse_f64(line, &fields[2], "weight")?,
                n => return Err(parse_err(line, format!("expected 2 or 3 columns, found {n}"))),
            };
            edges.push((fields[0].clone(), fields[1].clone(), w));
        }
        let label = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        lists.push((label, edges));
    }
    SnapshotSequence::from_edge_lists(directed, weighted, lists)
}
