//! Finite-difference checks of every analytic gradient. Each function runs
//! `instances` random problems and returns the worst relative error.

use gembed::gauss::{
    kg2e_loss_grad, kl_energy, kl_energy_grad, neg_log_el_grad, g2g_loss_grad, el_energy, EncoderParams,
    GaussianEmbedding, KgEmbedding, KgEnergy, MarginForm, Triplet,
};
use gembed::graph::{Edge, Graph, Triple};
use gembed::rng::{substream, Rng, Stream};
use gembed::sgns::{line_first_order_loss, line_second_order_loss, sgns_pair_loss, NegativeForm, PointEmbedding};
use rand::Rng as _;

use super::fixtures::{random_vec, random_weighted_graph};
use super::oracles::{finite_difference, relative_error};

pub const STEP: f64 = 1e-5;

fn rng(seed: u64, instance: usize) -> Rng {
    substream(seed, Stream::Sampling, instance as u64, 7)
}

fn worst(instances: usize, mut one: impl FnMut(usize) -> f64) -> f64 {
    (0..instances).map(&mut one).fold(0.0, f64::max)
}

pub fn sgns(instances: usize, seed: u64, form: NegativeForm) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let d = r.gen_range(2..12);
        let k = r.gen_range(1..6);
        let x = random_vec(&mut r, d * (k + 2), -1.0, 1.0);
        let eval = |x: &[f64]| {
            let negs: Vec<&[f64]> = x[2 * d..].chunks(d).collect();
            sgns_pair_loss(&x[..d], &x[d..2 * d], &negs, form).unwrap()
        };
        let l = eval(&x);
        let mut analytic = l.grad_center.clone();
        analytic.extend(&l.grad_context);
        l.grad_negatives.iter().for_each(|g| analytic.extend(g));
        let numeric = finite_difference(&mut |x| eval(x).loss, &x, STEP);
        relative_error(&analytic, &numeric)
    })
}

fn line_instance(r: &mut Rng, directed: bool, seed: u64) -> (Graph, Vec<Edge>, usize) {
    loop {
        let n = r.gen_range(4..9);
        let g = random_weighted_graph(n, 0.5, directed, seed ^ r.gen::<u64>());
        if g.edge_count() == 0 {
            continue;
        }
        let batch: Vec<Edge> = g.edges().iter().filter(|_| r.gen::<f64>() < 0.6).copied().collect();
        if batch.is_empty() {
            continue;
        }
        return (g, batch, r.gen_range(2..5));
    }
}

pub fn line_first(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let (g, batch, d) = line_instance(&mut r, false, seed);
        let n = g.node_count();
        let x = random_vec(&mut r, n * d, -0.8, 0.8);
        let eval = |x: &[f64]| {
            let emb = PointEmbedding::from_tables(d, x.to_vec(), vec![0.0; n * d]).unwrap();
            line_first_order_loss(&g, &emb, &batch).unwrap()
        };
        let l = eval(&x);
        assert!(l.grad_context.iter().all(|&v| v == 0.0));
        let numeric = finite_difference(&mut |x| eval(x).loss, &x, STEP);
        relative_error(&l.grad_center, &numeric)
    })
}

pub fn line_second(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let directed = i % 2 == 0;
        let (g, batch, d) = line_instance(&mut r, directed, seed);
        let n = g.node_count();
        let x = random_vec(&mut r, 2 * n * d, -0.8, 0.8);
        let eval = |x: &[f64]| {
            let emb = PointEmbedding::from_tables(d, x[..n * d].to_vec(), x[n * d..].to_vec()).unwrap();
            line_second_order_loss(&g, &emb, &batch).unwrap()
        };
        let l = eval(&x);
        let mut analytic = l.grad_center.clone();
        analytic.extend(&l.grad_context);
        let numeric = finite_difference(&mut |x| eval(x).loss, &x, STEP);
        relative_error(&analytic, &numeric)
    })
}

/// KL and negative log expected-likelihood energies w.r.t. all four inputs.
pub fn energies(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let d = r.gen_range(1..6);
        let mut x = random_vec(&mut r, 4 * d, -1.5, 1.5);
        for k in 0..d {
            x[d + k] = r.gen_range(0.2..3.0);
            x[3 * d + k] = r.gen_range(0.2..3.0);
        }
        let parts = |x: &[f64]| (x[..d].to_vec(), x[d..2 * d].to_vec(), x[2 * d..3 * d].to_vec(), x[3 * d..].to_vec());
        let (mi, si, mj, sj) = parts(&x);
        let mut err: f64 = 0.0;
        for use_kl in [true, false] {
            let g = if use_kl { kl_energy_grad(&mi, &si, &mj, &sj) } else { neg_log_el_grad(&mi, &si, &mj, &sj) }.unwrap();
            let analytic: Vec<f64> = [&g.d_mu_i, &g.d_sigma_i, &g.d_mu_j, &g.d_sigma_j].into_iter().flatten().copied().collect();
            let mut f = |x: &[f64]| {
                let (a, b, c, e) = parts(x);
                if use_kl {
                    kl_energy(&a, &b, &c, &e).unwrap()
                } else {
                    -el_energy(&a, &b, &c, &e).unwrap().ln()
                }
            };
            err = err.max(relative_error(&analytic, &finite_difference(&mut f, &x, STEP)));
        }
        err
    })
}

/// Square-exponential G2G loss through a one-hidden-layer encoder, w.r.t.
/// every encoder parameter.
pub fn g2g(instances: usize, seed: u64) -> f64 {
    worst(instances, |i| {
        let mut r = rng(seed, i);
        let input_dim = r.gen_range(3..11);
        let hidden = r.gen_range(3..8);
        let half = r.gen_range(2..5);
        let nodes = 6;
        let inputs: Vec<Vec<(usize, f64)>> = (0..nodes)
            .map(|_| {
                let mut row = Vec::new();
                for j in 0..input_dim {
                    if r.gen::<f64>() < 0.6 {
                        row.push((j, r.gen_range(-1.0..1.0)));
                    }
                }
                // an empty row puts every zero-bias hidden unit on the relu kink
                if row.is_empty() {
                    row.push((0, 0.5));
                }
                row
            })
            .collect();
        let triplets: Vec<Triplet> = (0..5)
            .map(|_| {
                let anchor = r.gen_range(0..nodes);
                let positive = (anchor + r.gen_range(1..nodes)) % nodes;
                let negative = (anchor + r.gen_range(1..nodes)) % nodes;
                Triplet { anchor, positive, pos_hop: 1, negative, neg_hop: 2 }
            })
            .collect();
        let mut enc = EncoderParams::new(input_dim, &[hidden], half, seed.wrapping_add(i as u64)).unwrap();
        // small weights keep exp(-E) in a well-conditioned range
        enc.params_mut().iter_mut().for_each(|w| *w *= 0.5);
        let x = enc.params().to_vec();
        let (_, analytic) = g2g_loss_grad(&enc, &inputs, &triplets).unwrap();
        let mut probe = enc.clone();
        let mut f = |x: &[f64]| {
            probe.params_mut().copy_from_slice(x);
            g2g_loss_grad(&probe, &inputs, &triplets).unwrap().0
        };
        relative_error(&analytic, &finite_difference(&mut f, &x, STEP))
    })
}

fn kg_from(x: &[f64], ne: usize, nr: usize, h: usize) -> KgEmbedding {
    let (em, rest) = x.split_at(ne * h);
    let (es, rest) = rest.split_at(ne * h);
    let (rm, rs) = rest.split_at(nr * h);
    KgEmbedding::new(
        GaussianEmbedding::new(h, em.to_vec(), es.to_vec()).unwrap(),
        GaussianEmbedding::new(h, rm.to_vec(), rs.to_vec()).unwrap(),
    )
    .unwrap()
}

/// KG2E margin loss w.r.t. all entity and relation parameters. Instances
/// whose hinge arguments come within `1e-3` of a kink are redrawn.
pub fn kg2e(instances: usize, seed: u64, energy: KgEnergy, form: MarginForm) -> f64 {
    let gamma = 1.0;
    worst(instances, |i| {
        let mut r = rng(seed, i);
        loop {
            let (ne, nr, h) = (5, 2, r.gen_range(2..5));
            let mut x = random_vec(&mut r, (ne + nr) * 2 * h, -1.0, 1.0);
            for (k, s) in x.iter_mut().enumerate() {
                let entity_sigma = (ne * h..2 * ne * h).contains(&k);
                if entity_sigma || k >= (2 * ne + nr) * h {
                    *s = r.gen_range(0.3..2.0);
                }
            }
            let triple = |r: &mut Rng| Triple::new(r.gen_range(0..ne), r.gen_range(0..nr), r.gen_range(0..ne));
            let pos: Vec<Triple> = (0..4).map(|_| triple(&mut r)).collect();
            let neg: Vec<Triple> = (0..4).map(|_| triple(&mut r)).collect();
            let emb = kg_from(&x, ne, nr, h);
            let near_kink = pos.iter().zip(&neg).any(|(p, n)| {
                let (ep, en) = (emb.energy(p, energy).unwrap(), emb.energy(n, energy).unwrap());
                let arg = match form {
                    MarginForm::Conventional => ep + gamma - en,
                    MarginForm::AsPrinted => ep - gamma + en,
                };
                arg.abs() < 1e-3
            });
            if near_kink {
                continue;
            }
            let (_, g) = kg2e_loss_grad(&emb, &pos, &neg, gamma, energy, form).unwrap();
            let analytic: Vec<f64> = [g.entity_mu, g.entity_sigma, g.relation_mu, g.relation_sigma].concat();
            let mut f = |x: &[f64]| kg2e_loss_grad(&kg_from(x, ne, nr, h), &pos, &neg, gamma, energy, form).unwrap().0;
            return relative_error(&analytic, &finite_difference(&mut f, &x, STEP));
        }
    })
}
