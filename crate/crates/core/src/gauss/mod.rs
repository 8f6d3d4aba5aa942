//! Gaussian node embeddings: energies, ranking losses, the attributed
//! encoder trained on hop-ordered triplets, and knowledge-graph training.

mod adam;
mod encoder;
mod energy;
mod g2g;
mod kg2e;
mod loss;
mod triplets;

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::IdMap;

pub use adam::{adam_step, AdamState};
pub use encoder::{positive_transform, EncoderParams, ForwardCache, SIGMA_FLOOR};
pub use energy::{el_energy, kl_energy, kl_energy_grad, neg_log_el_grad, w2_distance, EnergyGrad};
pub use g2g::{encode_all, g2g_energy, g2g_loss_grad, node_inputs, ranking_satisfaction, train_g2g, G2gConfig, G2gOutput};
pub use kg2e::{
    corrupt_triple, kg2e_loss_grad, train_kg2e, CorruptionMode, Corruptor, KgEmbedding, KgEnergy, KgGrad, Kg2eConfig,
    Side, MAX_CORRUPTION_TRIES,
};
pub use loss::{margin_ranking_loss, margin_ranking_subgrad, square_exp_grad, square_exp_loss, MarginForm};
pub use triplets::{sample_triplets, HopIndex, Triplet, TripletSet};

/// Per-node mean and diagonal variance, row-major `|V| x half_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianEmbedding {
    half_dim: usize,
    mu: Vec<f64>,
    sigma: Vec<f64>,
}

impl GaussianEmbedding {
    pub fn new(half_dim: usize, mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if half_dim == 0 || mu.len() % half_dim != 0 {
            return Err(Error::DimensionMismatch { expected: half_dim, got: mu.len() });
        }
        if sigma.len() != mu.len() {
            return Err(Error::DimensionMismatch { expected: mu.len(), got: sigma.len() });
        }
        if let Some(s) = sigma.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::Validation(format!("variance must be positive and finite, got {s}")));
        }
        Ok(Self { half_dim, mu, sigma })
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    /// Total embedding size `L` (mean plus variance entries).
    pub fn dim(&self) -> usize {
        2 * self.half_dim
    }

    pub fn node_count(&self) -> usize {
        self.mu.len() / self.half_dim
    }

    pub fn mu(&self, i: usize) -> &[f64] {
        &self.mu[i * self.half_dim..(i + 1) * self.half_dim]
    }

    pub fn sigma(&self, i: usize) -> &[f64] {
        &self.sigma[i * self.half_dim..(i + 1) * self.half_dim]
    }

    pub(crate) fn tables_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.mu, &mut self.sigma)
    }

    pub fn mu_rows(&self) -> Vec<Vec<f64>> {
        self.mu.chunks(self.half_dim).map(<[f64]>::to_vec).collect()
    }

    /// Mean variance over all nodes, per dimension.
    pub fn mean_sigma_per_dim(&self) -> Vec<f64> {
        let n = self.node_count().max(1) as f64;
        let mut acc = vec![0.0; self.half_dim];
        for row in self.sigma.chunks(self.half_dim) {
            for (a, s) in acc.iter_mut().zip(row) {
                *a += s;
            }
        }
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    /// `n L` header, then `id mu_1 .. mu_{L/2} sigma_1 .. sigma_{L/2}`.
    pub fn write<W: Write>(&self, ids: &IdMap, mut out: W) -> Result<()> {
        if ids.len() != self.node_count() {
            return Err(Error::DimensionMismatch { expected: self.node_count(), got: ids.len() });
        }
        writeln!(out, "{} {}", self.node_count(), self.dim())?;
        for i in 0..self.node_count() {
            write!(out, "{}", ids.name(i))?;
            for x in self.mu(i).iter().chain(self.sigma(i)) {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<(IdMap, Self)> {
        let (ids, dim, rows) = crate::sgns::read_table(reader)?;
        if dim % 2 != 0 {
            return Err(Error::Validation(format!("Gaussian embedding size must be even, got {dim}")));
        }
        let half = dim / 2;
        let mut mu = Vec::with_capacity(rows.len() * half);
        let mut sigma = Vec::with_capacity(rows.len() * half);
        for r in rows {
            mu.extend_from_slice(&r[..half]);
            sigma.extend_from_slice(&r[half..]);
        }
        Ok((ids, Self::new(half, mu, sigma)?))
    }
}

/// Per-epoch mean variance of every latent dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingHistory {
    rows: Vec<Vec<f64>>,
}

impl EmbeddingHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(first) = rows.first() {
            if let Some(bad) = rows.iter().find(|r| r.len() != first.len()) {
                return Err(Error::DimensionMismatch { expected: first.len(), got: bad.len() });
            }
        }
        Ok(Self { rows })
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn epochs(&self) -> usize {
        self.rows.len()
    }

    pub fn dims(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// CSV with header `epoch,dim,mean_sigma`, epochs counted from 0.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "epoch,dim,mean_sigma")?;
        for (e, row) in self.rows.iter().enumerate() {
            for (d, s) in row.iter().enumerate() {
                writeln!(out, "{e},{d},{s}")?;
            }
        }
        Ok(())
    }
}
