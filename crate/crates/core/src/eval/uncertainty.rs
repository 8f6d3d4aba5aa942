use crate::error::{Error, Result};
use crate::gauss::EmbeddingHistory;

/// Per-dimension variance curves of a Gaussian training run.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyCurves {
    /// `curves[d][e]`: mean sigma of dimension `d` after epoch `e`
    pub curves: Vec<Vec<f64>>,
    pub final_sigma: Vec<f64>,
}

pub fn uncertainty_per_dimension(history: &EmbeddingHistory) -> Result<UncertaintyCurves> {
    let rows = history.rows();
    let last = rows.last().ok_or_else(|| Error::Empty("empty training history".into()))?;
    let curves = (0..last.len()).map(|d| rows.iter().map(|r| r[d]).collect()).collect();
    Ok(UncertaintyCurves { curves, final_sigma: last.clone() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicDimension {
    /// size of the low-variance group
    pub l_eff: usize,
    /// mean sigma of the high group over mean sigma of the low group
    pub ratio: f64,
    /// dimensions in the low-variance group, ascending
    pub low_dims: Vec<usize>,
}

/// Optimal two-group split of `log(sigma)`; dimensions in the low group
/// are the effective ones.
pub fn intrinsic_dimension_estimate(sigmas: &[f64]) -> Result<IntrinsicDimension> {
    if sigmas.len() < 2 {
        return Err(Error::Validation("need at least two dimensions".into()));
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::Validation(format!("variance must be positive and finite, got {s}")));
    }
    let mut order: Vec<usize> = (0..sigmas.len()).collect();
    order.sort_by(|&a, &b| sigmas[a].total_cmp(&sigmas[b]).then(a.cmp(&b)));
    let logs: Vec<f64> = order.iter().map(|&i| sigmas[i].ln()).collect();
    let n = logs.len();
    if logs[0] == logs[n - 1] {
        return Ok(IntrinsicDimension { l_eff: n, ratio: 1.0, low_dims: (0..n).collect() });
    }

    let sse = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
    };
    // in one dimension the optimal 2-means split is contiguous in sorted order
    let cut = (1..n)
        .min_by(|&a, &b| (sse(&logs[..a]) + sse(&logs[a..])).total_cmp(&(sse(&logs[..b]) + sse(&logs[b..]))))
        .expect("n >= 2");
    let mean = |idx: &[usize]| idx.iter().map(|&i| sigmas[i]).sum::<f64>() / idx.len() as f64;
    let ratio = mean(&order[cut..]) / mean(&order[..cut]);
    let mut low_dims = order[..cut].to_vec();
    low_dims.sort_unstable();
    Ok(IntrinsicDimension { l_eff: cut, ratio, low_dims })
}
