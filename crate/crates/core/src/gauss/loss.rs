use crate::error::{Error, Result};

/// Square-exponential ranking loss `sum(E_pos^2 + exp(-E_neg))`.
pub fn square_exp_loss(energies: &[(f64, f64)]) -> f64 {
    energies.iter().map(|&(p, n)| p * p + (-n).exp()).sum()
}

/// Gradient of one square-exponential term w.r.t. `(E_pos, E_neg)`.
#[inline]
pub fn square_exp_grad(pos: f64, neg: f64) -> (f64, f64) {
    (2.0 * pos, -(-neg).exp())
}

/// Which hinge the margin loss uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum MarginForm {
    /// `max(0, E_pos + gamma - E_neg)`.
    #[default]
    Conventional,
    /// `max(0, E_pos - gamma + E_neg)`, the sign pattern sometimes printed
    /// for this loss. It does not separate positives from negatives.
    AsPrinted,
}

#[inline]
fn hinge_arg(pos: f64, neg: f64, gamma: f64, form: MarginForm) -> f64 {
    match form {
        MarginForm::Conventional => pos + gamma - neg,
        MarginForm::AsPrinted => pos - gamma + neg,
    }
}

/// Margin ranking loss over paired positive/negative energies.
pub fn margin_ranking_loss(pos: &[f64], neg: &[f64], gamma: f64, form: MarginForm) -> Result<f64> {
    if pos.len() != neg.len() {
        return Err(Error::DimensionMismatch { expected: pos.len(), got: neg.len() });
    }
    if !(gamma >= 0.0) {
        return Err(Error::Config(format!("margin must be non-negative, got {gamma}")));
    }
    Ok(pos
        .iter()
        .zip(neg)
        .map(|(&p, &n)| hinge_arg(p, n, gamma, form).max(0.0))
        .sum())
}

/// Subgradient of one hinge term w.r.t. `(E_pos, E_neg)`; zero when satisfied.
pub fn margin_ranking_subgrad(pos: f64, neg: f64, gamma: f64, form: MarginForm) -> (f64, f64) {
    if hinge_arg(pos, neg, gamma, form) <= 0.0 {
        return (0.0, 0.0);
    }
    match form {
        MarginForm::Conventional => (1.0, -1.0),
        MarginForm::AsPrinted => (1.0, 1.0),
    }
}
