//! Closed-form energies between diagonal Gaussians.
//!
//! `sigma` always holds the diagonal of the covariance (variances).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Energy value with its gradient w.r.t. both distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrad {
    pub value: f64,
    pub d_mu_i: Vec<f64>,
    pub d_sigma_i: Vec<f64>,
    pub d_mu_j: Vec<f64>,
    pub d_sigma_j: Vec<f64>,
}

fn check(mu_i: &[f64], sigma_i: &[f64], mu_j: &[f64], sigma_j: &[f64]) -> Result<()> {
    let d = mu_i.len();
    for v in [sigma_i, mu_j, sigma_j] {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: v.len() });
        }
    }
    if let Some(s) = sigma_i.iter().chain(sigma_j).find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::Validation(format!("variance must be positive and finite, got {s}")));
    }
    Ok(())
}

/// `KL(N(mu_i, sigma_i) || N(mu_j, sigma_j))`.
pub fn kl_energy(mu_i: &[f64], sigma_i: &[f64], mu_j: &[f64], sigma_j: &[f64]) -> Result<f64> {
    check(mu_i, sigma_i, mu_j, sigma_j)?;
    let mut acc = 0.0;
    for k in 0..mu_i.len() {
        let diff = mu_j[k] - mu_i[k];
        let ratio = sigma_i[k] / sigma_j[k];
        acc += ratio + diff * diff / sigma_j[k] - ratio.ln() - 1.0;
    }
    Ok(0.5 * acc)
}

pub fn kl_energy_grad(mu_i: &[f64], sigma_i: &[f64], mu_j: &[f64], sigma_j: &[f64]) -> Result<EnergyGrad> {
    let value = kl_energy(mu_i, sigma_i, mu_j, sigma_j)?;
    let d = mu_i.len();
    let mut g = EnergyGrad {
        value,
        d_mu_i: vec![0.0; d],
        d_sigma_i: vec![0.0; d],
        d_mu_j: vec![0.0; d],
        d_sigma_j: vec![0.0; d],
    };
    for k in 0..d {
        let diff = mu_j[k] - mu_i[k];
        let sj = sigma_j[k];
        g.d_mu_i[k] = -diff / sj;
        g.d_mu_j[k] = diff / sj;
        g.d_sigma_i[k] = 0.5 * (1.0 / sj - 1.0 / sigma_i[k]);
        g.d_sigma_j[k] = 0.5 * (1.0 / sj - (sigma_i[k] + diff * diff) / (sj * sj));
    }
    Ok(g)
}

/// Expected likelihood `integral N(x; i) N(x; j) dx = N(0; mu_i - mu_j, sigma_i + sigma_j)`.
pub fn el_energy(mu_i: &[f64], sigma_i: &[f64], mu_j: &[f64], sigma_j: &[f64]) -> Result<f64> {
    Ok((-neg_log_el(mu_i, sigma_i, mu_j, sigma_j)?).exp())
}

fn neg_log_el(mu_i: &[f64], sigma_i: &[f64], mu_j: &[f64], sigma_j: &[f64]) -> Result<f64> {
    check(mu_i, sigma_i, mu_j, sigma_j)?;
    let mut acc = 0.0;
    for k in 0..mu_i.len() {
        let s = sigma_i[k] + sigma_j[k];
        let diff = mu_i[k] - mu_j[k];
        acc += (2.0 * PI * s).ln() + diff * diff / s;
    }
    Ok(0.5 * acc)
}

/// `-ln` of [`el_energy`] with gradients; lower means more similar.
pub fn neg_log_el_grad(mu_i: &[f64], sigma_i: &[f64], mu_j: &[f64], sigma_j: &[f64]) -> Result<EnergyGrad> {
    let value = neg_log_el(mu_i, sigma_i, mu_j, sigma_j)?;
    let d = mu_i.len();
    let mut g = EnergyGrad {
        value,
        d_mu_i: vec![0.0; d],
        d_sigma_i: vec![0.0; d],
        d_mu_j: vec![0.0; d],
        d_sigma_j: vec![0.0; d],
    };
    for k in 0..d {
        let s = sigma_i[k] + sigma_j[k];
        let diff = mu_i[k] - mu_j[k];
        g.d_mu_i[k] = diff / s;
        g.d_mu_j[k] = -diff / s;
        let ds = 0.5 * (1.0 / s - diff * diff / (s * s));
        g.d_sigma_i[k] = ds;
        g.d_sigma_j[k] = ds;
    }
    Ok(g)
}

/// 2-Wasserstein distance between diagonal Gaussians.
pub fn w2_distance(mu_i: &[f64], sigma_i: &[f64], mu_j: &[f64], sigma_j: &[f64]) -> Result<f64> {
    check(mu_i, sigma_i, mu_j, sigma_j)?;
    let mut acc = 0.0;
    for k in 0..mu_i.len() {
        let dm = mu_i[k] - mu_j[k];
        let ds = sigma_i[k].sqrt() - sigma_j[k].sqrt();
        acc += dm * dm + ds * ds;
    }
    Ok(acc.sqrt())
}
