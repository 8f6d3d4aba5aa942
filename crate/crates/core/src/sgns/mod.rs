//! Point-vector embeddings: skip-gram with negative sampling over walk
//! corpora, and the LINE first/second-order objectives.

mod loss;
mod noise;
mod train;

use std::io::{BufRead, Write};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::graph::IdMap;
use crate::rng::{substream, Stream};

pub use loss::{
    line_first_order_loss, line_second_order_loss, log_sigmoid, sampled_pair_loss, sigmoid,
    sgns_pair_loss, LineLoss, NegativeForm, PairLoss,
};
pub use noise::{negative_sample, NoiseSampler};
pub use train::{train_line, train_skipgram, train_skipgram_keyed, LineOrder};

/// Center and context vector tables, row-major `|V| x dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEmbedding {
    dim: usize,
    center: Vec<f64>,
    context: Vec<f64>,
}

impl PointEmbedding {
    pub fn zeros(node_count: usize, dim: usize) -> Self {
        Self {
            dim,
            center: vec![0.0; node_count * dim],
            context: vec![0.0; node_count * dim],
        }
    }

    pub fn from_tables(dim: usize, center: Vec<f64>, context: Vec<f64>) -> Result<Self> {
        if dim == 0 || center.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, got: center.len() });
        }
        if context.len() != center.len() {
            return Err(Error::DimensionMismatch { expected: center.len(), got: context.len() });
        }
        Ok(Self { dim, center, context })
    }

    /// Center table from rows; the context table is zero.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut center = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            center.extend_from_slice(r);
        }
        let context = vec![0.0; center.len()];
        Self::from_tables(dim.max(1), center, context)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.center.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.center[i * self.dim..(i + 1) * self.dim]
    }

    pub fn context_row(&self, i: usize) -> &[f64] {
        &self.context[i * self.dim..(i + 1) * self.dim]
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn context(&self) -> &[f64] {
        &self.context
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.center.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn tables_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.center, &mut self.context)
    }

    /// Write `n dim` followed by `id v1 .. vdim` per node.
    pub fn write_word2vec<W: Write>(&self, ids: &IdMap, mut out: W) -> Result<()> {
        if ids.len() != self.node_count() {
            return Err(Error::DimensionMismatch { expected: self.node_count(), got: ids.len() });
        }
        writeln!(out, "{} {}", self.node_count(), self.dim)?;
        for i in 0..self.node_count() {
            write!(out, "{}", ids.name(i))?;
            for x in self.row(i) {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Parse the word2vec text format; the context table comes back zeroed.
    pub fn read_word2vec<R: BufRead>(reader: R) -> Result<(IdMap, Self)> {
        let (ids, dim, rows) = read_table(reader)?;
        let mut center = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            center.extend(r);
        }
        let context = vec![0.0; center.len()];
        Ok((ids, Self::from_tables(dim, center, context)?))
    }
}

/// Shared reader for `n dim` headed text tables: returns ids, width, rows.
pub(crate) fn read_table<R: BufRead>(reader: R) -> Result<(IdMap, usize, Vec<Vec<f64>>)> {
    let mut lines = reader.lines().enumerate();
    let (n, dim) = loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::Empty("embedding file".into()));
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| s.parse::<usize>().map_err(|_| parse_err(i + 1, "invalid header"));
        if f.len() != 2 {
            return Err(parse_err(i + 1, "header must be 'node_count dim'"));
        }
        break (parse(f[0])?, parse(f[1])?);
    };
    if dim == 0 {
        return Err(Error::Validation("embedding dimension must be positive".into()));
    }
    let mut ids = IdMap::new();
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines {
        let line = line?;
        let mut f = line.split_whitespace();
        let Some(name) = f.next() else { continue };
        let row = f
            .map(|s| s.parse::<f64>().map_err(|_| parse_err(i + 1, format!("invalid number '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != dim {
            return Err(parse_err(i + 1, format!("expected {dim} values, found {}", row.len())));
        }
        if ids.get(name).is_some() {
            return Err(parse_err(i + 1, format!("duplicate id '{name}'")));
        }
        ids.intern(name);
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Validation(format!("header declares {n} rows, found {}", rows.len())));
    }
    Ok((ids, dim, rows))
}

/// Uniform `[-0.5/dim, 0.5/dim]` center vectors and zero context vectors.
pub fn init_embeddings(node_count: usize, dim: usize, seed: u64) -> Result<PointEmbedding> {
    let keys: Vec<u64> = (0..node_count as u64).collect();
    init_embeddings_keyed(&keys, dim, seed)
}

/// Like [`init_embeddings`], but row `i` is drawn from a stream keyed by `keys[i]`.
pub fn init_embeddings_keyed(keys: &[u64], dim: usize, seed: u64) -> Result<PointEmbedding> {
    if dim == 0 {
        return Err(Error::Config("embedding dimension must be >= 1".into()));
    }
    let half = 0.5 / dim as f64;
    let mut center = Vec::with_capacity(keys.len() * dim);
    for &k in keys {
        let mut rng = substream(seed, Stream::Init, k, 0);
        center.extend((0..dim).map(|_| rng.gen_range(-half..=half)));
    }
    let context = vec![0.0; center.len()];
    PointEmbedding::from_tables(dim, center, context)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgnsConfig {
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Decay the rate linearly to `1e-4 * learning_rate` over training.
    pub linear_decay: bool,
    /// Negatives per positive pair.
    pub negatives: usize,
    /// Exponent applied to node frequencies in the noise distribution.
    pub noise_exponent: f64,
    pub seed: u64,
    /// 1 is deterministic; more threads apply lock-free updates.
    pub threads: usize,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        Self {
            dim: 128,
            epochs: 5,
            learning_rate: 0.025,
            linear_decay: true,
            negatives: 5,
            noise_exponent: 0.75,
            seed: 0,
            threads: 1,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be >= 1".into()));
        }
        if self.negatives == 0 {
            return Err(Error::Config("negatives must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.noise_exponent) {
            return Err(Error::Config("noise exponent must lie in [0, 1]".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        Ok(())
    }
}
