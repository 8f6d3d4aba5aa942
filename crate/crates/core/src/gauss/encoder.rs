//! Feed-forward encoder mapping node attributes to a diagonal Gaussian.
//!
//! `x -> [linear -> relu]* -> (mu head: linear, sigma head: elu + 1 + 1e-14)`.
//! All parameters live in one flat vector so the optimizer and gradient
//! checks can treat them uniformly.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

/// Offset added on top of `elu(.) + 1` so variances stay strictly positive.
pub const SIGMA_FLOOR: f64 = 1e-14;

#[inline]
fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

#[inline]
fn elu_grad(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        x.exp()
    }
}

/// Sigma-head transform applied to pre-activations.
#[inline]
pub fn positive_transform(x: f64) -> f64 {
    elu(x) + 1.0 + SIGMA_FLOOR
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Dense {
    n_in: usize,
    n_out: usize,
    /// weights `n_in x n_out`, row-major, followed by `n_out` biases
    offset: usize,
}

impl Dense {
    fn len(&self) -> usize {
        self.n_in * self.n_out + self.n_out
    }

    fn bias(&self) -> usize {
        self.offset + self.n_in * self.n_out
    }

    fn weight(&self, i: usize) -> usize {
        self.offset + i * self.n_out
    }
}

enum Input<'a> {
    Sparse(&'a [(usize, f64)]),
    Dense(&'a [f64]),
}

impl Input<'_> {
    fn for_each_nonzero(&self, mut f: impl FnMut(usize, f64)) {
        match self {
            Input::Sparse(x) => x.iter().for_each(|&(i, v)| f(i, v)),
            Input::Dense(x) => x.iter().enumerate().filter(|(_, v)| **v != 0.0).for_each(|(i, &v)| f(i, v)),
        }
    }
}

/// Encoder weights and layer layout.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    input_dim: usize,
    hidden: Vec<Dense>,
    mu_head: Dense,
    sigma_head: Dense,
    params: Vec<f64>,
}

/// Intermediate activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// pre-activations and activations of each hidden layer
    pre: Vec<Vec<f64>>,
    act: Vec<Vec<f64>>,
    sigma_pre: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl EncoderParams {
    /// All-zero parameters.
    pub fn zeros(input_dim: usize, hidden: &[usize], half_dim: usize) -> Self {
        let mut offset = 0;
        let mut n_in = input_dim;
        let mut layers = Vec::with_capacity(hidden.len());
        for &n_out in hidden {
            let l = Dense { n_in, n_out, offset };
            offset += l.len();
            layers.push(l);
            n_in = n_out;
        }
        let mu_head = Dense { n_in, n_out: half_dim, offset };
        offset += mu_head.len();
        let sigma_head = Dense { n_in, n_out: half_dim, offset };
        offset += sigma_head.len();
        Self {
            input_dim,
            hidden: layers,
            mu_head,
            sigma_head,
            params: vec![0.0; offset],
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn new(input_dim: usize, hidden: &[usize], half_dim: usize, seed: u64) -> Result<Self> {
        if input_dim == 0 || half_dim == 0 || hidden.contains(&0) {
            return Err(Error::Config("encoder layer widths must be positive".into()));
        }
        let mut enc = Self::zeros(input_dim, hidden, half_dim);
        let mut rng = substream(seed, Stream::Init, u64::MAX, 1);
        let layers: Vec<Dense> = enc.layers().collect();
        for l in layers {
            let limit = (6.0 / (l.n_in + l.n_out) as f64).sqrt();
            for w in &mut enc.params[l.offset..l.bias()] {
                *w = rng.gen_range(-limit..limit);
            }
        }
        Ok(enc)
    }

    fn layers(&self) -> impl Iterator<Item = Dense> + '_ {
        self.hidden.iter().copied().chain([self.mu_head, self.sigma_head])
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn half_dim(&self) -> usize {
        self.mu_head.n_out
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    fn affine(&self, l: Dense, x: &Input<'_>) -> Vec<f64> {
        let mut out = self.params[l.bias()..l.bias() + l.n_out].to_vec();
        x.for_each_nonzero(|i, v| {
            let row = &self.params[l.weight(i)..l.weight(i) + l.n_out];
            for (o, w) in out.iter_mut().zip(row) {
                *o += v * w;
            }
        });
        out
    }

    fn forward(&self, x: Input<'_>) -> ForwardCache {
        let mut pre = Vec::with_capacity(self.hidden.len());
        let mut act: Vec<Vec<f64>> = Vec::with_capacity(self.hidden.len());
        for &l in &self.hidden {
            let a = match act.last() {
                Some(h) => self.affine(l, &Input::Dense(h)),
                None => self.affine(l, &x),
            };
            act.push(a.iter().map(|v| v.max(0.0)).collect());
            pre.push(a);
        }
        let (mu, sigma_pre) = match act.last() {
            Some(h) => (self.affine(self.mu_head, &Input::Dense(h)), self.affine(self.sigma_head, &Input::Dense(h))),
            None => (self.affine(self.mu_head, &x), self.affine(self.sigma_head, &x)),
        };
        let sigma = sigma_pre.iter().map(|&v| positive_transform(v)).collect();
        ForwardCache { pre, act, sigma_pre, mu, sigma }
    }

    pub fn forward_sparse(&self, x: &[(usize, f64)]) -> Result<ForwardCache> {
        if let Some(&(i, _)) = x.iter().find(|(i, _)| *i >= self.input_dim) {
            return Err(Error::DimensionMismatch { expected: self.input_dim, got: i + 1 });
        }
        Ok(self.forward(Input::Sparse(x)))
    }

    /// Mean and variance vectors for a dense attribute row.
    pub fn encode(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, got: x.len() });
        }
        let c = self.forward(Input::Dense(x));
        Ok((c.mu, c.sigma))
    }

    pub fn encode_sparse(&self, x: &[(usize, f64)]) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = self.forward_sparse(x)?;
        Ok((c.mu, c.sigma))
    }

    /// Accumulate into `grads` the parameter gradient given upstream
    /// gradients w.r.t. the outputs `mu` and `sigma` of `cache`.
    pub fn backward(&self, x: &[(usize, f64)], cache: &ForwardCache, d_mu: &[f64], d_sigma: &[f64], grads: &mut [f64]) {
        debug_assert_eq!(grads.len(), self.params.len());
        let d_sigma_pre: Vec<f64> = d_sigma
            .iter()
            .zip(&cache.sigma_pre)
            .map(|(g, &a)| g * elu_grad(a))
            .collect();

        let input = |layer: usize| -> Input<'_> {
            if layer == 0 {
                Input::Sparse(x)
            } else {
                Input::Dense(&cache.act[layer - 1])
            }
        };
        let n_hidden = self.hidden.len();
        let mut d_h = vec![0.0; self.mu_head.n_in];
        for (head, d_out) in [(self.mu_head, d_mu), (self.sigma_head, &d_sigma_pre[..])] {
            self.accumulate(head, &input(n_hidden), d_out, grads);
            if n_hidden > 0 {
                self.back_into(head, d_out, &mut d_h);
            }
        }
        for li in (0..n_hidden).rev() {
            let l = self.hidden[li];
            let d_pre: Vec<f64> = d_h
                .iter()
                .zip(&cache.pre[li])
                .map(|(g, &a)| if a > 0.0 { *g } else { 0.0 })
                .collect();
            self.accumulate(l, &input(li), &d_pre, grads);
            if li > 0 {
                d_h = vec![0.0; l.n_in];
                self.back_into(l, &d_pre, &mut d_h);
            }
        }
    }

    fn accumulate(&self, l: Dense, x: &Input<'_>, d_out: &[f64], grads: &mut [f64]) {
        x.for_each_nonzero(|i, v| {
            let row = &mut grads[l.weight(i)..l.weight(i) + l.n_out];
            for (g, d) in row.iter_mut().zip(d_out) {
                *g += v * d;
            }
        });
        for (g, d) in grads[l.bias()..l.bias() + l.n_out].iter_mut().zip(d_out) {
            *g += d;
        }
    }

    fn back_into(&self, l: Dense, d_out: &[f64], d_in: &mut [f64]) {
        for (i, d) in d_in.iter_mut().enumerate() {
            let row = &self.params[l.weight(i)..l.weight(i) + l.n_out];
            *d += row.iter().zip(d_out).map(|(w, g)| w * g).sum::<f64>();
        }
    }
}
