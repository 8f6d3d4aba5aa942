//! Attributed Gaussian encoder trained on hop-ordered triplets with the
//! square-exponential ranking loss.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::encoder::{EncoderParams, ForwardCache};
use super::energy::{kl_energy, kl_energy_grad};
use super::loss::square_exp_grad;
use super::triplets::{HopIndex, Triplet};
use super::{EmbeddingHistory, GaussianEmbedding};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{substream, Stream};

/// Audit passes use triplet streams disjoint from the training passes.
const AUDIT_PASS: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2gConfig {
    /// total size `L`; the mean and variance halves are `L / 2` each
    pub dim: usize,
    pub hidden: Vec<usize>,
    pub max_hops: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// triplet draws per anchor per epoch
    pub triplet_rounds: usize,
    /// triplets per optimizer step, 0 for one step per epoch
    pub batch_size: usize,
    pub seed: u64,
    /// when non-zero, score this many fresh draws per anchor after every epoch
    pub audit_rounds: usize,
}

impl Default for G2gConfig {
    fn default() -> Self {
        Self {
            dim: 128,
            hidden: vec![512],
            max_hops: 2,
            epochs: 200,
            learning_rate: 1e-3,
            triplet_rounds: 1,
            batch_size: 0,
            seed: 0,
            audit_rounds: 0,
        }
    }
}

impl G2gConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim % 2 != 0 {
            return Err(Error::Config(format!("Gaussian embedding size must be even and positive, got {}", self.dim)));
        }
        if self.max_hops < 2 {
            return Err(Error::Config("K must be at least 2".into()));
        }
        if self.triplet_rounds == 0 {
            return Err(Error::Config("triplet_rounds must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct G2gOutput {
    pub embedding: GaussianEmbedding,
    pub encoder: EncoderParams,
    /// mean sigma per dimension after every epoch
    pub history: EmbeddingHistory,
    /// mean training loss per epoch
    pub losses: Vec<f64>,
    /// fraction of fresh triplets with `E_pos < E_neg` after every epoch
    pub ranking: Vec<f64>,
}

/// Energy between node `i` and node `j`: `KL(P_j || P_i)`.
pub fn g2g_energy(mu_i: &[f64], sigma_i: &[f64], mu_j: &[f64], sigma_j: &[f64]) -> Result<f64> {
    kl_energy(mu_j, sigma_j, mu_i, sigma_i)
}

/// Sparse encoder inputs: attribute rows, or one-hot identity rows when
/// the graph carries no attributes.
pub fn node_inputs(graph: &Graph) -> (usize, Vec<Vec<(usize, f64)>>) {
    match graph.attributes() {
        Some(a) => (a.dim(), (0..graph.node_count()).map(|v| a.row(v).to_vec()).collect()),
        None => (graph.node_count(), (0..graph.node_count()).map(|v| vec![(v, 1.0)]).collect()),
    }
}

/// Mean square-exponential loss over `triplets` and its gradient w.r.t.
/// every encoder parameter.
pub fn g2g_loss_grad(
    encoder: &EncoderParams,
    inputs: &[Vec<(usize, f64)>],
    triplets: &[Triplet],
) -> Result<(f64, Vec<f64>)> {
    if triplets.is_empty() {
        return Err(Error::Empty("no triplets".into()));
    }
    let mut nodes: Vec<usize> = triplets.iter().flat_map(|t| [t.anchor, t.positive, t.negative]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    if let Some(&v) = nodes.iter().find(|&&v| v >= inputs.len()) {
        return Err(Error::InvalidNode(v));
    }
    let caches: Vec<ForwardCache> = nodes
        .par_iter()
        .map(|&v| encoder.forward_sparse(&inputs[v]))
        .collect::<Result<_>>()?;
    let slot = |v: usize| nodes.binary_search(&v).expect("node collected above");

    let h = encoder.half_dim();
    let mut d_mu = vec![vec![0.0; h]; nodes.len()];
    let mut d_sigma = vec![vec![0.0; h]; nodes.len()];
    let scale = 1.0 / triplets.len() as f64;
    let mut loss = 0.0;
    for t in triplets {
        let (a, p, n) = (slot(t.anchor), slot(t.positive), slot(t.negative));
        // E(i, j) = KL(P_j || P_i): the "i" side of the KL is node j
        let ep = kl_energy_grad(&caches[p].mu, &caches[p].sigma, &caches[a].mu, &caches[a].sigma)?;
        let en = kl_energy_grad(&caches[n].mu, &caches[n].sigma, &caches[a].mu, &caches[a].sigma)?;
        loss += ep.value * ep.value + (-en.value).exp();
        let (gp, gn) = square_exp_grad(ep.value, en.value);
        let (gp, gn) = (gp * scale, gn * scale);
        for k in 0..h {
            d_mu[p][k] += gp * ep.d_mu_i[k];
            d_sigma[p][k] += gp * ep.d_sigma_i[k];
            d_mu[n][k] += gn * en.d_mu_i[k];
            d_sigma[n][k] += gn * en.d_sigma_i[k];
            d_mu[a][k] += gp * ep.d_mu_j[k] + gn * en.d_mu_j[k];
            d_sigma[a][k] += gp * ep.d_sigma_j[k] + gn * en.d_sigma_j[k];
        }
    }
    let mut grads = vec![0.0; encoder.param_count()];
    for (s, &v) in nodes.iter().enumerate() {
        encoder.backward(&inputs[v], &caches[s], &d_mu[s], &d_sigma[s], &mut grads);
    }
    Ok((loss * scale, grads))
}

/// Encode every node.
pub fn encode_all(encoder: &EncoderParams, inputs: &[Vec<(usize, f64)>]) -> Result<GaussianEmbedding> {
    let rows: Vec<(Vec<f64>, Vec<f64>)> = inputs.par_iter().map(|x| encoder.encode_sparse(x)).collect::<Result<_>>()?;
    let mut mu = Vec::with_capacity(rows.len() * encoder.half_dim());
    let mut sigma = Vec::with_capacity(rows.len() * encoder.half_dim());
    for (m, s) in rows {
        mu.extend(m);
        sigma.extend(s);
    }
    GaussianEmbedding::new(encoder.half_dim(), mu, sigma)
}

/// Fraction of `triplets` whose positive energy is below the negative one.
pub fn ranking_satisfaction(embedding: &GaussianEmbedding, triplets: &[Triplet]) -> Result<f64> {
    if triplets.is_empty() {
        return Err(Error::Empty("no triplets to audit".into()));
    }
    let mut ok = 0usize;
    for t in triplets {
        let (ma, sa) = (embedding.mu(t.anchor), embedding.sigma(t.anchor));
        let pos = g2g_energy(ma, sa, embedding.mu(t.positive), embedding.sigma(t.positive))?;
        let neg = g2g_energy(ma, sa, embedding.mu(t.negative), embedding.sigma(t.negative))?;
        if pos < neg {
            ok += 1;
        }
    }
    Ok(ok as f64 / triplets.len() as f64)
}

pub fn train_g2g(graph: &Graph, config: &G2gConfig) -> Result<G2gOutput> {
    config.validate()?;
    let index = HopIndex::new(graph, config.max_hops)?;
    let (input_dim, inputs) = node_inputs(graph);
    let mut encoder = EncoderParams::new(input_dim, &config.hidden, config.dim / 2, config.seed)?;
    let mut adam = AdamState::new(encoder.param_count());
    let mut history = EmbeddingHistory::new();
    let mut losses = Vec::with_capacity(config.epochs);
    let mut ranking = Vec::new();

    for epoch in 0..config.epochs as u64 {
        let mut triplets = index.sample(config.triplet_rounds, config.seed, epoch).triplets;
        triplets.shuffle(&mut substream(config.seed, Stream::Sampling, epoch, 0));
        let batch = if config.batch_size == 0 { triplets.len().max(1) } else { config.batch_size };
        let mut total = 0.0;
        for chunk in triplets.chunks(batch) {
            let (loss, grads) = g2g_loss_grad(&encoder, &inputs, chunk)?;
            adam_step(encoder.params_mut(), &grads, &mut adam, config.learning_rate)?;
            total += loss * chunk.len() as f64;
        }
        losses.push(total / triplets.len().max(1) as f64);

        let embedding = encode_all(&encoder, &inputs)?;
        history.push(embedding.mean_sigma_per_dim());
        if config.audit_rounds > 0 {
            let fresh = index.sample(config.audit_rounds, config.seed, AUDIT_PASS + epoch);
            ranking.push(ranking_satisfaction(&embedding, &fresh.triplets)?);
        }
    }

    let embedding = encode_all(&encoder, &inputs)?;
    Ok(G2gOutput { embedding, encoder, history, losses, ranking })
}
