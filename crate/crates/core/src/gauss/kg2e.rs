//! Knowledge-graph Gaussian embeddings trained with a margin ranking loss
//! over corrupted triples.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::energy::{kl_energy_grad, neg_log_el_grad, EnergyGrad};
use super::loss::{margin_ranking_subgrad, MarginForm};
use super::GaussianEmbedding;
use crate::error::{Error, Result};
use crate::graph::{KnowledgeTriples, Triple};
use crate::rng::{substream, Stream};

/// Attempts before a corruption is declared saturated.
pub const MAX_CORRUPTION_TRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KgEnergy {
    /// `KL(P_e || P_r)`
    #[default]
    Kl,
    /// `-ln` of the expected likelihood of `P_e` and `P_r`
    El,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorruptionMode {
    #[default]
    Unif,
    Bern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Head,
    Tail,
}

/// Replaces the head or tail of a triple with a random entity, avoiding
/// triples in the known set.
#[derive(Debug, Clone)]
pub struct Corruptor {
    mode: CorruptionMode,
    head_prob: Vec<f64>,
    entity_count: usize,
}

impl Corruptor {
    pub fn new(kg: &KnowledgeTriples, mode: CorruptionMode) -> Self {
        let r = kg.relation_count();
        let head_prob = match mode {
            CorruptionMode::Unif => vec![0.5; r],
            CorruptionMode::Bern => {
                let mut heads = vec![HashSet::new(); r];
                let mut tails = vec![HashSet::new(); r];
                let mut count = vec![0usize; r];
                for t in kg.triples() {
                    heads[t.relation].insert(t.head);
                    tails[t.relation].insert(t.tail);
                    count[t.relation] += 1;
                }
                (0..r)
                    .map(|k| {
                        if count[k] == 0 {
                            return 0.5;
                        }
                        let tph = count[k] as f64 / heads[k].len() as f64;
                        let hpt = count[k] as f64 / tails[k].len() as f64;
                        tph / (tph + hpt)
                    })
                    .collect()
            }
        };
        Self { mode, head_prob, entity_count: kg.entity_count() }
    }

    pub fn mode(&self) -> CorruptionMode {
        self.mode
    }

    /// Probability of replacing the head for `relation`.
    pub fn head_probability(&self, relation: usize) -> f64 {
        self.head_prob.get(relation).copied().unwrap_or(0.5)
    }

    pub fn corrupt<R: Rng + ?Sized>(&self, known: &KnowledgeTriples, t: &Triple, rng: &mut R) -> Result<(Triple, Side)> {
        if self.entity_count == 0 {
            return Err(Error::Empty("no entities".into()));
        }
        // the side is drawn once so rejections do not skew the head/tail split
        let side = if rng.gen::<f64>() < self.head_probability(t.relation) { Side::Head } else { Side::Tail };
        for _ in 0..MAX_CORRUPTION_TRIES {
            let e = rng.gen_range(0..self.entity_count);
            let c = match side {
                Side::Head => Triple::new(e, t.relation, t.tail),
                Side::Tail => Triple::new(t.head, t.relation, e),
            };
            if !known.contains(&c) {
                return Ok((c, side));
            }
        }
        Err(Error::Saturated(MAX_CORRUPTION_TRIES))
    }
}

/// One corrupted copy of `t` that is not in `known`.
pub fn corrupt_triple<R: Rng + ?Sized>(
    known: &KnowledgeTriples,
    t: &Triple,
    mode: CorruptionMode,
    rng: &mut R,
) -> Result<Triple> {
    if known.is_empty() {
        return Err(Error::Empty("no triples".into()));
    }
    Corruptor::new(known, mode).corrupt(known, t, rng).map(|(c, _)| c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kg2eConfig {
    pub dim: usize,
    pub gamma: f64,
    pub energy: KgEnergy,
    pub mode: CorruptionMode,
    pub margin: MarginForm,
    pub epochs: usize,
    pub learning_rate: f64,
    /// positive triples per SGD step
    pub batch_size: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub seed: u64,
}

impl Default for Kg2eConfig {
    fn default() -> Self {
        Self {
            dim: 20,
            gamma: 1.0,
            energy: KgEnergy::Kl,
            mode: CorruptionMode::Unif,
            margin: MarginForm::Conventional,
            epochs: 200,
            learning_rate: 0.01,
            batch_size: 1,
            sigma_min: 0.05,
            sigma_max: 5.0,
            seed: 0,
        }
    }
}

impl Kg2eConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim % 2 != 0 {
            return Err(Error::Config(format!("Gaussian embedding size must be even and positive, got {}", self.dim)));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::Config(format!("margin must be non-negative, got {}", self.gamma)));
        }
        if !(self.learning_rate > 0.0) || self.batch_size == 0 {
            return Err(Error::Config("learning rate and batch size must be positive".into()));
        }
        if !(self.sigma_min > 0.0 && self.sigma_min <= self.sigma_max) {
            return Err(Error::Config("need 0 < sigma_min <= sigma_max".into()));
        }
        Ok(())
    }
}

/// Entity and relation Gaussians of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct KgEmbedding {
    pub entities: GaussianEmbedding,
    pub relations: GaussianEmbedding,
}

/// Gradients laid out like the embedding tables.
#[derive(Debug, Clone, PartialEq)]
pub struct KgGrad {
    pub entity_mu: Vec<f64>,
    pub entity_sigma: Vec<f64>,
    pub relation_mu: Vec<f64>,
    pub relation_sigma: Vec<f64>,
}

impl KgEmbedding {
    pub fn new(entities: GaussianEmbedding, relations: GaussianEmbedding) -> Result<Self> {
        if entities.half_dim() != relations.half_dim() {
            return Err(Error::DimensionMismatch { expected: entities.half_dim(), got: relations.half_dim() });
        }
        Ok(Self { entities, relations })
    }

    fn check(&self, t: &Triple) -> Result<()> {
        let n = self.entities.node_count();
        if t.head >= n || t.tail >= n {
            return Err(Error::InvalidNode(t.head.max(t.tail)));
        }
        if t.relation >= self.relations.node_count() {
            return Err(Error::Validation(format!("invalid relation id {}", t.relation)));
        }
        Ok(())
    }

    fn transfer(&self, t: &Triple) -> (Vec<f64>, Vec<f64>) {
        let (mh, mt) = (self.entities.mu(t.head), self.entities.mu(t.tail));
        let (sh, st) = (self.entities.sigma(t.head), self.entities.sigma(t.tail));
        (
            mh.iter().zip(mt).map(|(a, b)| a - b).collect(),
            sh.iter().zip(st).map(|(a, b)| a + b).collect(),
        )
    }

    fn energy_grad(&self, t: &Triple, energy: KgEnergy) -> Result<EnergyGrad> {
        self.check(t)?;
        let (mu_e, sigma_e) = self.transfer(t);
        let (mu_r, sigma_r) = (self.relations.mu(t.relation), self.relations.sigma(t.relation));
        match energy {
            KgEnergy::Kl => kl_energy_grad(&mu_e, &sigma_e, mu_r, sigma_r),
            KgEnergy::El => neg_log_el_grad(&mu_e, &sigma_e, mu_r, sigma_r),
        }
    }

    /// Energy of `t`; lower is more plausible.
    pub fn energy(&self, t: &Triple, energy: KgEnergy) -> Result<f64> {
        Ok(self.energy_grad(t, energy)?.value)
    }
}

/// Summed margin loss over paired positives and negatives with its gradient.
pub fn kg2e_loss_grad(
    emb: &KgEmbedding,
    positives: &[Triple],
    negatives: &[Triple],
    gamma: f64,
    energy: KgEnergy,
    form: MarginForm,
) -> Result<(f64, KgGrad)> {
    if positives.len() != negatives.len() {
        return Err(Error::DimensionMismatch { expected: positives.len(), got: negatives.len() });
    }
    let h = emb.entities.half_dim();
    let mut g = KgGrad {
        entity_mu: vec![0.0; emb.entities.node_count() * h],
        entity_sigma: vec![0.0; emb.entities.node_count() * h],
        relation_mu: vec![0.0; emb.relations.node_count() * h],
        relation_sigma: vec![0.0; emb.relations.node_count() * h],
    };
    let mut loss = 0.0;
    for (p, n) in positives.iter().zip(negatives) {
        let ep = emb.energy_grad(p, energy)?;
        let en = emb.energy_grad(n, energy)?;
        loss += super::loss::margin_ranking_loss(&[ep.value], &[en.value], gamma, form)?;
        let (gp, gn) = margin_ranking_subgrad(ep.value, en.value, gamma, form);
        for (t, e, w) in [(p, &ep, gp), (n, &en, gn)] {
            if w == 0.0 {
                continue;
            }
            for k in 0..h {
                g.entity_mu[t.head * h + k] += w * e.d_mu_i[k];
                g.entity_mu[t.tail * h + k] -= w * e.d_mu_i[k];
                g.entity_sigma[t.head * h + k] += w * e.d_sigma_i[k];
                g.entity_sigma[t.tail * h + k] += w * e.d_sigma_i[k];
                g.relation_mu[t.relation * h + k] += w * e.d_mu_j[k];
                g.relation_sigma[t.relation * h + k] += w * e.d_sigma_j[k];
            }
        }
    }
    Ok((loss, g))
}

fn init_table(count: usize, half: usize, seed: u64, stream_key: u64) -> Result<GaussianEmbedding> {
    let bound = 6.0 / (half as f64).sqrt();
    let mut mu = Vec::with_capacity(count * half);
    for i in 0..count {
        let mut rng = substream(seed, Stream::Init, i as u64, stream_key);
        let mut row: Vec<f64> = (0..half).map(|_| rng.gen_range(-bound..bound)).collect();
        normalize(&mut row);
        mu.extend(row);
    }
    GaussianEmbedding::new(half, mu, vec![1.0; count * half])
}

/// Scale `row` into the unit ball.
fn normalize(row: &mut [f64]) {
    let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 {
        row.iter_mut().for_each(|x| *x /= norm);
    }
}

pub fn train_kg2e(kg: &KnowledgeTriples, config: &Kg2eConfig) -> Result<KgEmbedding> {
    config.validate()?;
    if kg.is_empty() {
        return Err(Error::Empty("no triples".into()));
    }
    let half = config.dim / 2;
    let mut emb = KgEmbedding::new(
        init_table(kg.entity_count(), half, config.seed, 2)?,
        init_table(kg.relation_count(), half, config.seed, 3)?,
    )?;
    let corruptor = Corruptor::new(kg, config.mode);
    let mut order: Vec<Triple> = kg.triples().to_vec();

    for epoch in 0..config.epochs as u64 {
        order.shuffle(&mut substream(config.seed, Stream::Sampling, epoch, 0));
        let mut rng = substream(config.seed, Stream::Corruption, epoch, 0);
        for batch in order.chunks(config.batch_size) {
            let negatives = batch
                .iter()
                .map(|t| corruptor.corrupt(kg, t, &mut rng).map(|(c, _)| c))
                .collect::<Result<Vec<_>>>()?;
            let (_, g) = kg2e_loss_grad(&emb, batch, &negatives, config.gamma, config.energy, config.margin)?;
            apply(&mut emb.entities, &g.entity_mu, &g.entity_sigma, config);
            apply(&mut emb.relations, &g.relation_mu, &g.relation_sigma, config);
        }
    }
    Ok(emb)
}

fn apply(table: &mut GaussianEmbedding, d_mu: &[f64], d_sigma: &[f64], config: &Kg2eConfig) {
    let half = table.half_dim();
    let (mu, sigma) = table.tables_mut();
    for (m, d) in mu.iter_mut().zip(d_mu) {
        *m -= config.learning_rate * d;
    }
    for row in mu.chunks_mut(half) {
        normalize(row);
    }
    for (s, d) in sigma.iter_mut().zip(d_sigma) {
        *s = (*s - config.learning_rate * d).clamp(config.sigma_min, config.sigma_max);
    }
}
