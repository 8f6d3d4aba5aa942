use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use gembed::graph::{load_edge_list, load_labels, Attributes, Graph, KnowledgeTriples, Triple};
use gembed::rng::{substream, Rng, Stream};
use rand::Rng as _;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Zachary's karate club with the two-faction labels.
pub fn karate() -> Graph {
    let g = load_edge_list(BufReader::new(File::open(data_path("karate.edgelist")).unwrap()), false, false).unwrap();
    load_labels(g, BufReader::new(File::open(data_path("karate.labels")).unwrap())).unwrap()
}

fn rng(seed: u64, key: u64) -> Rng {
    substream(seed, Stream::Sampling, u64::MAX - key, 0)
}

/// Stochastic block model; node `v` belongs to block `blocks[v]`.
pub fn block_graph(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> (Graph, Vec<usize>) {
    let blocks: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat(b).take(s)).collect();
    let n = blocks.len();
    let mut r = rng(seed, 1);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if blocks[u] == blocks[v] { p_in } else { p_out };
            if r.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    (Graph::from_pairs(n, false, &pairs).unwrap(), blocks)
}

/// Bag-of-words style attributes: each block owns `words` indicator
/// columns switched on with probability `p_word`; `noise` shared columns
/// are switched on with probability `p_noise`.
pub fn block_attributes(blocks: &[usize], words: usize, p_word: f64, noise: usize, p_noise: f64, seed: u64) -> Attributes {
    let n_blocks = blocks.iter().max().map_or(0, |b| b + 1);
    let dim = n_blocks * words + noise;
    let mut r = rng(seed, 2);
    let rows = blocks
        .iter()
        .map(|&b| {
            let mut row = Vec::new();
            for w in 0..words {
                if r.gen::<f64>() < p_word {
                    row.push((b * words + w, 1.0));
                }
            }
            for w in 0..noise {
                if r.gen::<f64>() < p_noise {
                    row.push((n_blocks * words + w, 1.0));
                }
            }
            row
        })
        .collect();
    Attributes::new(dim, rows).unwrap()
}

/// Entities in `levels` ordered groups; relation `r` links every entity
/// of group `g` to every entity of group `g + r + 1`.
pub fn layered_kg(levels: usize, per_level: usize, relations: usize) -> KnowledgeTriples {
    let mut triples = Vec::new();
    for r in 0..relations {
        for g in 0..levels {
            let h = g + r + 1;
            if h >= levels {
                continue;
            }
            for a in 0..per_level {
                for b in 0..per_level {
                    triples.push(Triple::new(g * per_level + a, r, h * per_level + b));
                }
            }
        }
    }
    KnowledgeTriples::from_triples(levels * per_level, relations, &triples).unwrap()
}

/// Erdős–Rényi graph with random positive weights.
pub fn random_weighted_graph(n: usize, p: f64, directed: bool, seed: u64) -> Graph {
    let mut r = rng(seed, 3);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if r.gen::<f64>() < p {
                edges.push((u, v, r.gen_range(0.1..3.0)));
            }
        }
    }
    Graph::from_edges(n, directed, &edges).unwrap()
}

pub fn random_vec(r: &mut Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| r.gen_range(lo..hi)).collect()
}

pub fn test_rng(key: u64) -> Rng {
    substream(0x5eed, Stream::Sampling, key, 99)
}
