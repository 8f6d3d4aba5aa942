use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use super::loss::sigmoid;
use super::noise::NoiseSampler;
use super::{init_embeddings_keyed, PointEmbedding, SgnsConfig};
use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{substream, Rng, Stream};
use crate::walks::WalkCorpus;

/// Row-major f64 table that worker threads update without locks.
///
/// Relaxed atomics keep concurrent writes defined; concurrent updates to the
/// same row may interleave, which the SGD tolerates.
struct SharedRows {
    dim: usize,
    cells: Vec<AtomicU64>,
}

impl SharedRows {
    fn new(dim: usize, values: &[f64]) -> Self {
        Self {
            dim,
            cells: values.iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
        }
    }

    #[inline]
    fn read(&self, row: usize, buf: &mut [f64]) {
        let base = row * self.dim;
        for (k, b) in buf.iter_mut().enumerate() {
            *b = f64::from_bits(self.cells[base + k].load(Ordering::Relaxed));
        }
    }

    #[inline]
    fn add(&self, row: usize, scale: f64, delta: &[f64]) {
        let base = row * self.dim;
        for (k, d) in delta.iter().enumerate() {
            let cell = &self.cells[base + k];
            let x = f64::from_bits(cell.load(Ordering::Relaxed));
            cell.store((x + scale * d).to_bits(), Ordering::Relaxed);
        }
    }

    #[inline]
    fn dot(&self, row: usize, v: &[f64]) -> f64 {
        let base = row * self.dim;
        v.iter()
            .enumerate()
            .map(|(k, x)| x * f64::from_bits(self.cells[base + k].load(Ordering::Relaxed)))
            .sum()
    }

    fn into_vec(self) -> Vec<f64> {
        self.cells.into_iter().map(|c| f64::from_bits(c.into_inner())).collect()
    }
}

struct Schedule {
    initial: f64,
    decay: bool,
    total: usize,
    done: AtomicUsize,
}

impl Schedule {
    fn rate(&self) -> f64 {
        if !self.decay || self.total == 0 {
            return self.initial;
        }
        let done = self.done.load(Ordering::Relaxed) as f64;
        self.initial * (1.0 - done / self.total as f64).max(1e-4)
    }

    fn tick(&self) {
        self.done.fetch_add(1, Ordering::Relaxed);
    }
}

/// One negative-sampling SGD step for `source` against `target` and `k`
/// noise targets; `source` lives in `src_tab`, targets in `tgt_tab`.
#[allow(clippy::too_many_arguments)]
fn sgd_step(
    src_tab: &SharedRows,
    tgt_tab: &SharedRows,
    source: usize,
    target: usize,
    noise: &NoiseSampler,
    k: usize,
    lr: f64,
    rng: &mut Rng,
    src_buf: &mut [f64],
    acc: &mut [f64],
) {
    src_tab.read(source, src_buf);
    acc.iter_mut().for_each(|x| *x = 0.0);
    let mut update = |t: usize, label: f64| {
        let g = lr * (label - sigmoid(tgt_tab.dot(t, src_buf)));
        let base = t * tgt_tab.dim;
        for (k, a) in acc.iter_mut().enumerate() {
            *a += g * f64::from_bits(tgt_tab.cells[base + k].load(Ordering::Relaxed));
        }
        tgt_tab.add(t, g, src_buf);
    };
    update(target, 1.0);
    for _ in 0..k {
        let n = noise.sample(rng);
        if n != target {
            update(n, 0.0);
        }
    }
    src_tab.add(source, 1.0, acc);
}

fn pair_count(len: usize, window: usize) -> usize {
    (0..len)
        .map(|i| (i + window).min(len.saturating_sub(1)) - i.saturating_sub(window))
        .sum()
}

/// Train skip-gram vectors with negative sampling on a walk corpus.
///
/// The context window is taken from the corpus configuration. Noise
/// frequencies are node occurrence counts in the corpus.
pub fn train_skipgram(corpus: &WalkCorpus, node_count: usize, config: &SgnsConfig) -> Result<PointEmbedding> {
    let keys: Vec<u64> = (0..node_count as u64).collect();
    train_skipgram_keyed(corpus, &keys, config)
}

/// [`train_skipgram`] with per-node stream keys.
///
/// Initialization of row `i` and the layout of the noise table follow
/// `keys[i]`. Relabeling nodes together with their keys and walks
/// therefore relabels the result and nothing else.
pub fn train_skipgram_keyed(corpus: &WalkCorpus, keys: &[u64], config: &SgnsConfig) -> Result<PointEmbedding> {
    config.validate()?;
    let node_count = keys.len();
    if corpus.is_empty() {
        return Err(Error::Empty("walk corpus".into()));
    }
    let mut counts = vec![0.0; node_count];
    for walk in &corpus.walks {
        for &v in walk {
            if v >= node_count {
                return Err(Error::InvalidNode(v));
            }
            counts[v] += 1.0;
        }
    }
    let mut emb = init_embeddings_keyed(keys, config.dim, config.seed)?;
    if config.epochs == 0 {
        return Ok(emb);
    }
    let mut order: Vec<usize> = (0..node_count).collect();
    order.sort_by_key(|&v| keys[v]);
    let noise = NoiseSampler::with_order(&counts, config.noise_exponent, order)?;
    let window = corpus.config.window.max(1);

    let per_epoch: usize = corpus.walks.iter().map(|w| pair_count(w.len(), window)).sum();
    let schedule = Schedule {
        initial: config.learning_rate,
        decay: config.linear_decay,
        total: per_epoch * config.epochs,
        done: AtomicUsize::new(0),
    };
    let (center, context) = emb.tables_mut();
    let src = SharedRows::new(config.dim, center);
    let tgt = SharedRows::new(config.dim, context);

    let threads = config.threads.min(corpus.walks.len()).max(1);
    let chunk = corpus.walks.len().div_ceil(threads);
    for epoch in 0..config.epochs {
        let work = |(part, walks): (usize, &[Vec<usize>])| {
            let mut rng = substream(config.seed, Stream::Negatives, part as u64, epoch as u64);
            let mut buf = vec![0.0; config.dim];
            let mut acc = vec![0.0; config.dim];
            for walk in walks {
                for i in 0..walk.len() {
                    let lo = i.saturating_sub(window);
                    let hi = (i + window + 1).min(walk.len());
                    for j in (lo..hi).filter(|&j| j != i) {
                        let lr = schedule.rate();
                        sgd_step(&src, &tgt, walk[i], walk[j], &noise, config.negatives, lr, &mut rng, &mut buf, &mut acc);
                        schedule.tick();
                    }
                }
            }
        };
        if threads == 1 {
            work((0, &corpus.walks));
        } else {
            std::thread::scope(|s| {
                for part in corpus.walks.chunks(chunk).enumerate() {
                    s.spawn(move || work(part));
                }
            });
        }
    }
    let (center, context) = emb.tables_mut();
    center.copy_from_slice(&src.into_vec());
    context.copy_from_slice(&tgt.into_vec());
    Ok(emb)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOrder {
    First,
    Second,
}

/// Train LINE embeddings by edge sampling with negative sampling.
///
/// Arcs are drawn proportionally to weight (undirected edges in both
/// orientations). One epoch draws as many samples as there are arcs.
/// First order scores `z_i . z_j`, second order scores `z'_j . z_i`.
pub fn train_line(graph: &Graph, order: LineOrder, config: &SgnsConfig) -> Result<PointEmbedding> {
    config.validate()?;
    if order == LineOrder::First && graph.is_directed() {
        return Err(Error::Config("first-order LINE needs an undirected graph".into()));
    }
    let n = graph.node_count();
    let keys: Vec<u64> = (0..n as u64).collect();
    let mut emb = init_embeddings_keyed(&keys, config.dim, config.seed)?;
    if config.epochs == 0 {
        return Ok(emb);
    }
    let mut arcs = Vec::new();
    let mut weights = Vec::new();
    for v in 0..n {
        for &(x, w) in graph.neighbors(v) {
            arcs.push((v, x));
            weights.push(w);
        }
    }
    let sampler = AliasTable::new(&weights).ok_or_else(|| Error::Empty("graph has no edges".into()))?;
    let noise = NoiseSampler::from_graph(graph, config.noise_exponent)?;

    let per_epoch = arcs.len();
    let schedule = Schedule {
        initial: config.learning_rate,
        decay: config.linear_decay,
        total: per_epoch * config.epochs,
        done: AtomicUsize::new(0),
    };
    let (center, context) = emb.tables_mut();
    let src = SharedRows::new(config.dim, center);
    let ctx = SharedRows::new(config.dim, context);
    let tgt = match order {
        LineOrder::First => &src,
        LineOrder::Second => &ctx,
    };

    let threads = config.threads.max(1);
    for epoch in 0..config.epochs {
        let work = |part: usize, samples: usize| {
            let mut rng = substream(config.seed, Stream::Negatives, part as u64, epoch as u64);
            let mut buf = vec![0.0; config.dim];
            let mut acc = vec![0.0; config.dim];
            for _ in 0..samples {
                let (i, j) = arcs[sampler.sample(&mut rng)];
                let lr = schedule.rate();
                sgd_step(&src, tgt, i, j, &noise, config.negatives, lr, &mut rng, &mut buf, &mut acc);
                schedule.tick();
            }
        };
        if threads == 1 {
            work(0, per_epoch);
        } else {
            let share = per_epoch.div_ceil(threads);
            std::thread::scope(|s| {
                for part in 0..threads {
                    let samples = share.min(per_epoch.saturating_sub(part * share));
                    let work = &work;
                    s.spawn(move || work(part, samples));
                }
            });
        }
    }
    let (center, context) = emb.tables_mut();
    center.copy_from_slice(&src.into_vec());
    context.copy_from_slice(&ctx.into_vec());
    Ok(emb)
}
