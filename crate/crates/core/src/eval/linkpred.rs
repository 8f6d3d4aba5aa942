use crate::error::{Error, Result};
use crate::gauss::{g2g_energy, GaussianEmbedding};
use crate::sgns::PointEmbedding;

/// ROC AUC and average precision of scored pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkScores {
    pub auc: f64,
    pub ap: f64,
}

/// AUC from mid-ranks (ties count one half) and step-wise average precision.
pub fn link_prediction(scored: &[(bool, f64)]) -> Result<LinkScores> {
    if let Some((_, s)) = scored.iter().find(|(_, s)| s.is_nan()) {
        return Err(Error::Validation(format!("score is not a number: {s}")));
    }
    let n_pos = scored.iter().filter(|(l, _)| *l).count();
    let n_neg = scored.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Validation("link prediction needs both positive and negative pairs".into()));
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[a].1.total_cmp(&scored[b].1));

    // ascending mid-ranks, 1-based
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scored[order[j + 1]].1 == scored[order[i]].1 {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += mid * order[i..=j].iter().filter(|&&k| scored[k].0).count() as f64;
        i = j + 1;
    }
    let (p, q) = (n_pos as f64, n_neg as f64);
    let auc = (rank_sum - p * (p + 1.0) / 2.0) / (p * q);

    // precision at each distinct threshold, descending
    let mut ap = 0.0;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = order.len();
    while i > 0 {
        let s = scored[order[i - 1]].1;
        let mut gained = 0;
        while i > 0 && scored[order[i - 1]].1 == s {
            if scored[order[i - 1]].0 {
                tp += 1;
                gained += 1;
            } else {
                fp += 1;
            }
            i -= 1;
        }
        ap += gained as f64 / p * tp as f64 / (tp + fp) as f64;
    }
    Ok(LinkScores { auc, ap })
}

fn check_pairs(n: usize, pairs: &[(usize, usize, bool)]) -> Result<()> {
    match pairs.iter().find(|(u, v, _)| *u >= n || *v >= n) {
        Some(&(u, v, _)) => Err(Error::InvalidNode(u.max(v))),
        None => Ok(()),
    }
}

/// Dot-product scores of labelled pairs.
pub fn score_pairs_point(emb: &PointEmbedding, pairs: &[(usize, usize, bool)]) -> Result<Vec<(bool, f64)>> {
    check_pairs(emb.node_count(), pairs)?;
    Ok(pairs
        .iter()
        .map(|&(u, v, l)| (l, emb.row(u).iter().zip(emb.row(v)).map(|(a, b)| a * b).sum()))
        .collect())
}

/// Negative energy scores of labelled pairs.
pub fn score_pairs_gaussian(emb: &GaussianEmbedding, pairs: &[(usize, usize, bool)]) -> Result<Vec<(bool, f64)>> {
    check_pairs(emb.node_count(), pairs)?;
    pairs
        .iter()
        .map(|&(u, v, l)| Ok((l, -g2g_energy(emb.mu(u), emb.sigma(u), emb.mu(v), emb.sigma(v))?)))
        .collect()
}
