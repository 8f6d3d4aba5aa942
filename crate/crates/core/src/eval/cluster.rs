//! k-means, silhouette, and agreement between clusterings.

use std::collections::BTreeMap;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// sum of squared distances to the assigned centroid
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let dim = points.first().map_or(0, Vec::len);
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation("points must be finite".into()));
    }
    Ok(dim)
}

/// k-means with [`DEFAULT_RESTARTS`] k-means++ restarts.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<KMeans> {
    kmeans_restarts(points, k, seed, max_iter, DEFAULT_RESTARTS)
}

/// Best of `restarts` Lloyd runs by inertia.
pub fn kmeans_restarts(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize, restarts: usize) -> Result<KMeans> {
    let dim = check_points(points)?;
    if k == 0 || k > points.len() {
        return Err(Error::Config(format!("k = {k} must be between 1 and the point count {}", points.len())));
    }
    let mut best: Option<KMeans> = None;
    for r in 0..restarts.max(1) as u64 {
        let run = lloyd(points, dim, k, seed, r, max_iter);
        if best.as_ref().map_or(true, |b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn lloyd(points: &[Vec<f64>], dim: usize, k: usize, seed: u64, restart: u64, max_iter: usize) -> KMeans {
    let mut rng = substream(seed, Stream::Cluster, restart, 0);
    let n = points.len();

    // k-means++ seeding
    let mut centroids = vec![points[rng.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut t = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if t < d {
                    pick = i;
                    break;
                }
                t -= d;
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centroids.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centroids[centroids.len() - 1]));
        }
    }

    let mut assignments = vec![usize::MAX; n];
    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        for (a, p) in assignments.iter_mut().zip(points) {
            let c = nearest(p, &centroids);
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&a, p) in assignments.iter().zip(points) {
            counts[a] += 1;
            sums[a].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        for c in 0..k {
            if counts[c] == 0 {
                // move an empty centroid onto the point farthest from its own
                let far = (0..n)
                    .max_by(|&i, &j| {
                        sq_dist(&points[i], &centroids[assignments[i]])
                            .total_cmp(&sq_dist(&points[j], &centroids[assignments[j]]))
                    })
                    .expect("non-empty");
                centroids[c] = points[far].clone();
                assignments[far] = c;
            } else {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let inertia = assignments.iter().zip(points).map(|(&a, p)| sq_dist(p, &centroids[a])).sum();
    KMeans { assignments, centroids, inertia }
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (c, m) in centroids.iter().enumerate() {
        let d = sq_dist(p, m);
        if d < best.1 {
            best = (c, d);
        }
    }
    best.0
}

/// Mean silhouette with Euclidean distance; singleton clusters score 0.
pub fn silhouette(points: &[Vec<f64>], assignments: &[usize]) -> Result<f64> {
    check_points(points)?;
    if points.len() != assignments.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), got: assignments.len() });
    }
    let labels: Vec<usize> = {
        let mut l = assignments.to_vec();
        l.sort_unstable();
        l.dedup();
        l
    };
    if labels.len() < 2 {
        return Err(Error::Validation("silhouette needs at least two clusters".into()));
    }
    let cl: Vec<usize> = assignments.iter().map(|a| labels.binary_search(a).expect("collected")).collect();
    let mut sizes = vec![0usize; labels.len()];
    cl.iter().for_each(|&c| sizes[c] += 1);

    let n = points.len();
    let mut total = 0.0;
    let mut sums = vec![0.0; labels.len()];
    for i in 0..n {
        if sizes[cl[i]] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if i != j {
                sums[cl[j]] += sq_dist(&points[i], &points[j]).sqrt();
            }
        }
        let a = sums[cl[i]] / (sizes[cl[i]] - 1) as f64;
        let b = (0..labels.len())
            .filter(|&c| c != cl[i])
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    pub nmi: f64,
    /// accuracy under the best one-to-one relabelling of predictions
    pub accuracy: f64,
}

/// Normalized mutual information (arithmetic-mean normalization) and
/// best-permutation accuracy.
pub fn nmi_and_accuracy(pred: &[usize], truth: &[usize]) -> Result<Agreement> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    if pred.is_empty() {
        return Err(Error::Empty("no assignments".into()));
    }
    let index = |xs: &[usize]| -> (Vec<usize>, usize) {
        let mut map = BTreeMap::new();
        for &x in xs {
            let next = map.len();
            map.entry(x).or_insert(next);
        }
        (xs.iter().map(|x| map[x]).collect(), map.len())
    };
    let (p, kp) = index(pred);
    let (t, kt) = index(truth);
    let mut table = vec![vec![0usize; kt]; kp];
    for (&a, &b) in p.iter().zip(&t) {
        table[a][b] += 1;
    }
    let n = pred.len() as f64;
    let entropy = |counts: Vec<usize>| -> f64 {
        counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n).map(|q| -q * q.ln()).sum()
    };
    let row: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<usize> = (0..kt).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let mut mi = 0.0;
    for a in 0..kp {
        for b in 0..kt {
            let c = table[a][b];
            if c > 0 {
                let c = c as f64;
                mi += c / n * (n * c / (row[a] as f64 * col[b] as f64)).ln();
            }
        }
    }
    let (hp, ht) = (entropy(row), entropy(col));
    let nmi = if hp == 0.0 && ht == 0.0 {
        1.0
    } else {
        (mi / ((hp + ht) / 2.0)).clamp(0.0, 1.0)
    };

    let size = kp.max(kt);
    let weights: Vec<Vec<i64>> = (0..size)
        .map(|a| (0..size).map(|b| if a < kp && b < kt { table[a][b] as i64 } else { 0 }).collect())
        .collect();
    let matrix = Matrix::from_rows(weights).map_err(|e| Error::Validation(e.to_string()))?;
    let (matched, _) = kuhn_munkres(&matrix);
    Ok(Agreement { nmi, accuracy: matched as f64 / n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_pairs() {
        let pts = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![10.0, 10.0], vec![10.0, 10.1]];
        let km = kmeans(&pts, 2, 0, 100).unwrap();
        assert_eq!(km.assignments[0], km.assignments[1]);
        assert_eq!(km.assignments[2], km.assignments[3]);
        assert_ne!(km.assignments[0], km.assignments[2]);
        let s = silhouette(&pts, &km.assignments).unwrap();
        assert!(s > 0.9);
    }

    #[test]
    fn k_equals_n_has_zero_inertia() {
        let pts = vec![vec![0.0], vec![1.0], vec![5.0]];
        assert_eq!(kmeans(&pts, 3, 1, 10).unwrap().inertia, 0.0);
        assert!(kmeans(&pts, 4, 1, 10).is_err());
    }

    #[test]
    fn silhouette_errors_on_one_cluster() {
        assert!(silhouette(&[vec![0.0], vec![1.0]], &[0, 0]).is_err());
    }

    #[test]
    fn agreement_examples() {
        let a = nmi_and_accuracy(&[1, 1, 0, 0], &[0, 0, 1, 1]).unwrap();
        assert!((a.nmi - 1.0).abs() < 1e-12);
        assert_eq!(a.accuracy, 1.0);
        let c = nmi_and_accuracy(&[0, 0, 0, 0], &[0, 0, 1, 1]).unwrap();
        assert_eq!((c.nmi, c.accuracy), (0.0, 0.5));
    }
}
