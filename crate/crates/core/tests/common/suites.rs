//! Randomized comparisons of library routines against the oracles. Each
//! suite returns the worst discrepancy it saw.

use std::collections::HashMap;

use gembed::eval::{
    kmeans, link_prediction, nmi_and_accuracy, pca_project, silhouette, similarity, snapshot_stability,
    SimilarityKind,
};
use gembed::gauss::{el_energy, kl_energy, w2_distance};
use gembed::graph::SnapshotSequence;
use gembed::rng::{substream, Rng, Stream};
use rand::Rng as _;

use super::fixtures::random_vec;
use super::oracles::{
    accuracy_by_permutation, auc_by_pairs, covariance, dot_dd, el_by_quadrature, exhaustive_kmeans_inertia,
    jacobi_eigenvalues, kl_by_quadrature, silhouette_by_definition,
};

fn rng(seed: u64, instance: usize) -> Rng {
    substream(seed, Stream::Sampling, instance as u64, 13)
}

fn worst(instances: usize, mut one: impl FnMut(usize) -> f64) -> f64 {
    (0..instances).map(&mut one).fold(0.0, f64::max)
}

fn gaussian_pair(r: &mut Rng, d: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    (
        random_vec(r, d, -2.0, 2.0),
        random_vec(r, d, 0.2, 3.0),
        random_vec(r, d, -2.0, 2.0),
        random_vec(r, d, 0.2, 3.0),
    )
}

/// Closed-form KL and expected likelihood against numerical integration in
/// one and two dimensions; absolute error.
pub fn energies_vs_quadrature(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let (mi, si, mj, sj) = gaussian_pair(&mut r, 1 + i % 2);
        let kl = kl_energy(&mi, &si, &mj, &sj).unwrap();
        let el = el_energy(&mi, &si, &mj, &sj).unwrap();
        let kl_q = kl_by_quadrature(&mi, &si, &mj, &sj);
        let el_q = el_by_quadrature(&mi, &si, &mj, &sj);
        (kl - kl_q).abs().max((el - el_q).abs())
    })
}

/// W2 between diagonal Gaussians against the general trace formula
/// `|dm|^2 + tr(S1 + S2 - 2 (S2^1/2 S1 S2^1/2)^1/2)`, specialized to
/// diagonal covariances one coordinate at a time.
pub fn w2_vs_trace_formula(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let d = r.gen_range(1..9);
        let (mi, si, mj, sj) = gaussian_pair(&mut r, d);
        let mut sq = 0.0;
        for k in 0..d {
            let cross = (sj[k].sqrt() * si[k] * sj[k].sqrt()).sqrt();
            sq += (mi[k] - mj[k]).powi(2) + si[k] + sj[k] - 2.0 * cross;
        }
        let got = w2_distance(&mi, &si, &mj, &sj).unwrap();
        (got - sq.max(0.0).sqrt()).abs()
    })
}

/// Rank AUC against pair counting. Scores are drawn from a small grid so
/// ties occur.
pub fn auc_vs_pairs(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let n = r.gen_range(2..=500);
        let mut scored: Vec<(bool, f64)> = (0..n).map(|_| (r.gen::<bool>(), f64::from(r.gen_range(0..20u8)))).collect();
        scored[0].0 = true;
        scored[1].0 = false;
        (link_prediction(&scored).unwrap().auc - auc_by_pairs(&scored)).abs()
    })
}

pub fn silhouette_vs_definition(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let n = r.gen_range(4..30);
        let k = r.gen_range(2..5.min(n));
        let points: Vec<Vec<f64>> = (0..n).map(|_| random_vec(&mut r, 3, -1.0, 1.0)).collect();
        let mut labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        labels[0] = 0;
        labels[1] = 1;
        (silhouette(&points, &labels).unwrap() - silhouette_by_definition(&points, &labels)).abs()
    })
}

/// k-means inertia on 12 points against exhaustive search, relative.
pub fn kmeans_vs_exhaustive(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let k = 2 + i % 2;
        let points: Vec<Vec<f64>> = (0..12).map(|_| random_vec(&mut r, 2, -1.0, 1.0)).collect();
        let km = kmeans(&points, k, seed + i as u64, 300).unwrap();
        let best = exhaustive_kmeans_inertia(&points, k);
        (km.inertia - best).abs() / best
    })
}

/// PCA explained variances against Jacobi eigenvalues of the covariance.
pub fn pca_vs_jacobi(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let d = r.gen_range(2..7);
        let n = r.gen_range(d + 1..40);
        let scales = random_vec(&mut r, d, 0.1, 3.0);
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| random_vec(&mut r, d, -1.0, 1.0).iter().zip(&scales).map(|(x, s)| x * s).collect()).collect();
        let p = pca_project(&rows, d).unwrap();
        let want = jacobi_eigenvalues(covariance(&rows));
        p.explained_variance.iter().zip(&want).map(|(a, b)| (a - b.max(0.0)).abs()).fold(0.0, f64::max)
    })
}

/// NMI from joint and marginal entropies, `I = H(P) + H(T) - H(P, T)`.
fn nmi_by_entropies(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len() as f64;
    let h = |counts: HashMap<Vec<usize>, usize>| -> f64 {
        counts.values().map(|&c| c as f64 / n).map(|q| -q * q.log2()).sum()
    };
    let count = |key: &dyn Fn(usize) -> Vec<usize>| {
        let mut m = HashMap::new();
        for i in 0..pred.len() {
            *m.entry(key(i)).or_insert(0) += 1;
        }
        m
    };
    let hp = h(count(&|i| vec![pred[i]]));
    let ht = h(count(&|i| vec![truth[i]]));
    let hj = h(count(&|i| vec![pred[i], truth[i]]));
    if hp + ht == 0.0 {
        return 1.0;
    }
    2.0 * (hp + ht - hj) / (hp + ht)
}

/// NMI and matched accuracy on 8 points against entropy and permutation
/// oracles.
pub fn agreement_vs_oracles(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let k = r.gen_range(1..5);
        let pred: Vec<usize> = (0..8).map(|_| r.gen_range(0..k)).collect();
        let truth: Vec<usize> = (0..8).map(|_| r.gen_range(0..k)).collect();
        let a = nmi_and_accuracy(&pred, &truth).unwrap();
        let acc = accuracy_by_permutation(&pred, &truth, k);
        (a.accuracy - acc).abs().max((a.nmi - nmi_by_entropies(&pred, &truth)).abs())
    })
}

/// Dot and cosine similarity against double-double accumulation, relative
/// to the magnitude of the terms.
pub fn similarity_vs_dd(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let d = r.gen_range(1..200);
        let a = random_vec(&mut r, d, -1.0, 1.0);
        let b = random_vec(&mut r, d, -1.0, 1.0);
        let mag: f64 = a.iter().zip(&b).map(|(x, y)| (x * y).abs()).sum();
        let dot = dot_dd(&a, &b);
        let cos = dot / (dot_dd(&a, &a).sqrt() * dot_dd(&b, &b).sqrt());
        let e_dot = (similarity(&a, &b, SimilarityKind::Dot).unwrap() - dot).abs() / mag;
        let e_cos = (similarity(&a, &b, SimilarityKind::Cosine).unwrap() - cos).abs();
        e_dot.max(e_cos)
    })
}

/// Stability constant of a hand-worked three-snapshot sequence over nodes
/// a, b, c with one-dimensional embeddings.
pub fn stability_hand_example() -> f64 {
    let e = |s: &str, d: &str, w: f64| (s.to_string(), d.to_string(), w);
    let seq = SnapshotSequence::from_edge_lists(
        false,
        true,
        vec![
            ("0".into(), vec![e("a", "b", 1.0)]),
            ("1".into(), vec![e("a", "b", 2.0), e("b", "c", 1.0)]),
            ("2".into(), vec![e("a", "b", 2.0), e("b", "c", 3.0), e("a", "c", 1.0)]),
        ],
    )
    .unwrap();
    let v = |x: f64| Some(vec![x]);
    let embeddings = vec![vec![v(1.0), v(1.0), None], vec![v(2.0), v(1.0), v(1.0)], vec![v(2.0), v(1.0), v(3.0)]];
    // 0 -> 1 on {a, b}: |dF|/|F| = 1/sqrt 2, |dS|/|S| = sqrt 2/sqrt 2 = 1
    // 1 -> 2 on {a, b, c}: |dF|/|F| = 2/sqrt 6, |dS|/|S| = sqrt 10/sqrt 10 = 1
    let ratios = [1.0 / 2f64.sqrt(), 2.0 / 6f64.sqrt()];
    let report = snapshot_stability(&seq, &embeddings).unwrap();
    let ratio_err = report.ratios.iter().zip(&ratios).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ratio_err.max((report.constant - (ratios[1] - ratios[0])).abs())
}
