use rand::SeedableRng;

use super::{NoiseSampler, PointEmbedding};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::rng::Rng;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(sigmoid(x))` without overflow.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    x.min(0.0) - (-x.abs()).exp().ln_1p()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How negative samples enter the skip-gram objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeForm {
    /// `-log sigma(-z_u . z_n)`: the usual bounded form.
    #[default]
    Standard,
    /// `+log sigma(z_u . z_n)`, literally as the objective is often printed.
    /// Unbounded below; kept for comparison only.
    AsPrinted,
}

/// Loss of one positive pair plus negatives, with gradients for every input.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLoss {
    pub loss: f64,
    pub grad_center: Vec<f64>,
    pub grad_context: Vec<f64>,
    pub grad_negatives: Vec<Vec<f64>>,
}

/// Skip-gram negative-sampling loss for center `z_u`, context `z_v` and
/// negative context vectors.
pub fn sgns_pair_loss(z_u: &[f64], z_v: &[f64], negatives: &[&[f64]], form: NegativeForm) -> Result<PairLoss> {
    let d = z_u.len();
    for v in std::iter::once(z_v).chain(negatives.iter().copied()) {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: v.len() });
        }
    }
    let s = dot(z_u, z_v);
    let mut loss = -log_sigmoid(s);
    let gs = sigmoid(s) - 1.0;
    let mut grad_center: Vec<f64> = z_v.iter().map(|x| gs * x).collect();
    let grad_context: Vec<f64> = z_u.iter().map(|x| gs * x).collect();
    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for z_n in negatives {
        let sn = dot(z_u, z_n);
        let gn = match form {
            NegativeForm::Standard => {
                loss -= log_sigmoid(-sn);
                sigmoid(sn)
            }
            NegativeForm::AsPrinted => {
                loss += log_sigmoid(sn);
                1.0 - sigmoid(sn)
            }
        };
        for (g, x) in grad_center.iter_mut().zip(z_n.iter()) {
            *g += gn * x;
        }
        grad_negatives.push(z_u.iter().map(|x| gn * x).collect());
    }
    Ok(PairLoss { loss, grad_center, grad_context, grad_negatives })
}

/// Mean standard skip-gram loss over `pairs`, with `k` negatives per pair
/// drawn from a fixed stream.
pub fn sampled_pair_loss(
    emb: &PointEmbedding,
    pairs: &[(usize, usize)],
    noise: &NoiseSampler,
    k: usize,
    seed: u64,
) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let mut rng = Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for &(u, v) in pairs {
        let zu = emb.row(u);
        total -= log_sigmoid(dot(zu, emb.context_row(v)));
        for _ in 0..k {
            let n = noise.sample(&mut rng);
            total -= log_sigmoid(-dot(zu, emb.context_row(n)));
        }
    }
    total / pairs.len() as f64
}

/// Exact LINE loss with gradients over both tables (row-major like the embedding).
#[derive(Debug, Clone, PartialEq)]
pub struct LineLoss {
    pub loss: f64,
    pub grad_center: Vec<f64>,
    pub grad_context: Vec<f64>,
}

fn check_batch(graph: &Graph, emb: &PointEmbedding, batch: &[Edge]) -> Result<()> {
    if emb.node_count() != graph.node_count() {
        return Err(Error::DimensionMismatch { expected: graph.node_count(), got: emb.node_count() });
    }
    for e in batch {
        for v in [e.src, e.dst] {
            if v >= graph.node_count() {
                return Err(Error::InvalidNode(v));
            }
        }
    }
    Ok(())
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// First-order proximity loss `-sum w_ij log p1(i, j)` over `batch`, where
/// `p1` is the softmax of `z_i . z_j` over the edges of `graph`.
pub fn line_first_order_loss(graph: &Graph, emb: &PointEmbedding, batch: &[Edge]) -> Result<LineLoss> {
    if graph.is_directed() {
        return Err(Error::Config("first-order proximity needs an undirected graph".into()));
    }
    check_batch(graph, emb, batch)?;
    let (n, d) = (emb.node_count(), emb.dim());
    let mut grad_center = vec![0.0; n * d];
    let grad_context = vec![0.0; n * d];
    if batch.is_empty() {
        return Ok(LineLoss { loss: 0.0, grad_center, grad_context });
    }
    if graph.edge_count() == 0 {
        return Err(Error::Empty("graph has no edges to normalize over".into()));
    }
    let scores: Vec<f64> = graph.edges().iter().map(|e| dot(emb.row(e.src), emb.row(e.dst))).collect();
    let lse = log_sum_exp(&scores);
    let total_w: f64 = batch.iter().map(|e| e.weight).sum();

    let mut loss = total_w * lse;
    for e in batch {
        let (i, j) = (e.src, e.dst);
        loss -= e.weight * dot(emb.row(i), emb.row(j));
        axpy(&mut grad_center[i * d..(i + 1) * d], -e.weight, emb.row(j));
        axpy(&mut grad_center[j * d..(j + 1) * d], -e.weight, emb.row(i));
    }
    for (e, s) in graph.edges().iter().zip(&scores) {
        let a = total_w * (s - lse).exp();
        let (i, j) = (e.src, e.dst);
        axpy(&mut grad_center[i * d..(i + 1) * d], a, emb.row(j));
        axpy(&mut grad_center[j * d..(j + 1) * d], a, emb.row(i));
    }
    Ok(LineLoss { loss, grad_center, grad_context })
}

/// Second-order proximity loss `-sum w_ij log p2(j | i)` over `batch`, with
/// `p2` the softmax of `z'_k . z_i` over all nodes `k`. Each batch edge is
/// read as `src -> dst`.
pub fn line_second_order_loss(graph: &Graph, emb: &PointEmbedding, batch: &[Edge]) -> Result<LineLoss> {
    check_batch(graph, emb, batch)?;
    let (n, d) = (emb.node_count(), emb.dim());
    let mut grad_center = vec![0.0; n * d];
    let mut grad_context = vec![0.0; n * d];
    let mut loss = 0.0;
    let mut scores = vec![0.0; n];
    for e in batch {
        let (i, j, w) = (e.src, e.dst, e.weight);
        let zi = emb.row(i);
        for (k, s) in scores.iter_mut().enumerate() {
            *s = dot(emb.context_row(k), zi);
        }
        let lse = log_sum_exp(&scores);
        loss -= w * (scores[j] - lse);
        let gi = &mut grad_center[i * d..(i + 1) * d];
        axpy(gi, -w, emb.context_row(j));
        for (k, s) in scores.iter().enumerate() {
            let p = (s - lse).exp();
            axpy(&mut grad_center[i * d..(i + 1) * d], w * p, emb.context_row(k));
            axpy(&mut grad_context[k * d..(k + 1) * d], w * p, zi);
        }
        axpy(&mut grad_context[j * d..(j + 1) * d], -w, zi);
    }
    Ok(LineLoss { loss, grad_center, grad_context })
}
