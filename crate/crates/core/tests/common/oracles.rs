//! Reference computations written independently of the library code.

use std::f64::consts::PI;

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2.0, depth + 1) + rec(f, m, b, tol / 2.0, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// Integration window wide enough to hold both diagonal Gaussians.
fn window(mu: &[f64], sigma: &[f64], nu: &[f64], tau: &[f64], k: usize) -> (f64, f64) {
    let (s1, s2) = (sigma[k].sqrt(), tau[k].sqrt());
    ((mu[k] - 14.0 * s1).min(nu[k] - 14.0 * s2), (mu[k] + 14.0 * s1).max(nu[k] + 14.0 * s2))
}

fn density(x: &[f64], mu: &[f64], sigma: &[f64]) -> f64 {
    x.iter()
        .zip(mu)
        .zip(sigma)
        .map(|((x, m), s)| (-(x - m) * (x - m) / (2.0 * s)).exp() / (2.0 * PI * s).sqrt())
        .product()
}

fn log_density(x: &[f64], mu: &[f64], sigma: &[f64]) -> f64 {
    x.iter()
        .zip(mu)
        .zip(sigma)
        .map(|((x, m), s)| -(x - m) * (x - m) / (2.0 * s) - 0.5 * (2.0 * PI * s).ln())
        .sum()
}

/// Integrate `f` over R^d (d = 1 or 2) by nested adaptive quadrature.
fn integrate_nd(f: &dyn Fn(&[f64]) -> f64, bounds: &[(f64, f64)], tol: f64) -> f64 {
    match bounds.len() {
        1 => integrate(&|x| f(&[x]), bounds[0].0, bounds[0].1, tol),
        2 => integrate(
            &|x| integrate(&|y| f(&[x, y]), bounds[1].0, bounds[1].1, tol),
            bounds[0].0,
            bounds[0].1,
            tol,
        ),
        d => panic!("unsupported dimension {d}"),
    }
}

/// `integral N(x; mu, sigma) N(x; nu, tau) dx` by quadrature.
pub fn el_by_quadrature(mu: &[f64], sigma: &[f64], nu: &[f64], tau: &[f64]) -> f64 {
    let bounds: Vec<(f64, f64)> = (0..mu.len()).map(|k| window(mu, sigma, nu, tau, k)).collect();
    integrate_nd(&|x| density(x, mu, sigma) * density(x, nu, tau), &bounds, 1e-12)
}

/// `KL(N(mu, sigma) || N(nu, tau))` by quadrature of `p log(p / q)`.
pub fn kl_by_quadrature(mu: &[f64], sigma: &[f64], nu: &[f64], tau: &[f64]) -> f64 {
    let bounds: Vec<(f64, f64)> = (0..mu.len())
        .map(|k| {
            let s = sigma[k].sqrt();
            (mu[k] - 14.0 * s, mu[k] + 14.0 * s)
        })
        .collect();
    integrate_nd(
        &|x| {
            let p = density(x, mu, sigma);
            if p == 0.0 {
                0.0
            } else {
                p * (log_density(x, mu, sigma) - log_density(x, nu, tau))
            }
        },
        &bounds,
        1e-12,
    )
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Dot product carried in double-double arithmetic.
pub fn dot_dd(a: &[f64], b: &[f64]) -> f64 {
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for (x, y) in a.iter().zip(b) {
        let p = x * y;
        let e = x.mul_add(*y, -p);
        let (s, t) = two_sum(hi, p);
        hi = s;
        lo += t + e;
    }
    hi + lo
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Sample covariance (divided by n) of row vectors.
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    (0..d)
        .map(|i| (0..d).map(|j| rows.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / n).collect())
        .collect()
}

/// Minimum k-means inertia over every assignment of points to `k` labels.
pub fn exhaustive_kmeans_inertia(points: &[Vec<f64>], k: usize) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for j in 0..d {
                sums[l][j] += p[j];
            }
        }
        if counts.iter().all(|&c| c > 0) {
            let inertia: f64 = points
                .iter()
                .zip(&labels)
                .map(|(p, &l)| (0..d).map(|j| (p[j] - sums[l][j] / counts[l] as f64).powi(2)).sum::<f64>())
                .sum();
            best = best.min(inertia);
        }
        // odometer increment; fixing labels[0] = 0 removes label symmetry
        let mut i = n - 1;
        loop {
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
            if i == 1 {
                return best;
            }
            i -= 1;
        }
    }
}

/// Fraction of positive/negative pairs ordered correctly, ties counting half.
pub fn auc_by_pairs(scored: &[(bool, f64)]) -> f64 {
    let mut wins = 0.0;
    let mut total = 0.0;
    for &(lp, sp) in scored {
        if !lp {
            continue;
        }
        for &(ln, sn) in scored {
            if ln {
                continue;
            }
            total += 1.0;
            if sp > sn {
                wins += 1.0;
            } else if sp == sn {
                wins += 0.5;
            }
        }
    }
    wins / total
}

/// Silhouette straight from its definition.
pub fn silhouette_by_definition(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let n = points.len();
    let mut clusters: Vec<usize> = labels.to_vec();
    clusters.sort_unstable();
    clusters.dedup();
    let mut total = 0.0;
    for i in 0..n {
        let own: Vec<usize> = (0..n).filter(|&j| j != i && labels[j] == labels[i]).collect();
        if own.is_empty() {
            continue;
        }
        let a = own.iter().map(|&j| dist(&points[i], &points[j])).sum::<f64>() / own.len() as f64;
        let mut b = f64::INFINITY;
        for &c in &clusters {
            if c == labels[i] {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&j| labels[j] == c).collect();
            b = b.min(members.iter().map(|&j| dist(&points[i], &points[j])).sum::<f64>() / members.len() as f64);
        }
        total += (b - a) / a.max(b);
    }
    total / n as f64
}

/// All-pairs hop distances by repeated relaxation; `None` when unreachable.
pub fn all_pairs_hops(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<Option<usize>>> {
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for &(u, v) in arcs {
        if u != v {
            d[u][v] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].map_or(true, |c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Best accuracy over every relabelling of `pred` into the labels of `truth`.
pub fn accuracy_by_permutation(pred: &[usize], truth: &[usize], k: usize) -> f64 {
    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }
    permutations(k)
        .iter()
        .map(|perm| pred.iter().zip(truth).filter(|(p, t)| perm[**p] == **t).count())
        .max()
        .unwrap() as f64
        / pred.len() as f64
}

/// Central finite-difference gradient of `f` at `x`.
pub fn finite_difference(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `||a - b|| / max(||a||, ||b||)`, zero when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}
