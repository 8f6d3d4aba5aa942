use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coords: Vec<Vec<f64>>,
    /// variance captured by each output axis, descending
    pub explained_variance: Vec<f64>,
    /// principal directions, one per output axis
    pub components: Vec<Vec<f64>>,
}

/// Project centered `vectors` onto their top `out_dim` principal axes.
/// Each axis is signed so its largest-magnitude loading is positive.
pub fn pca_project(vectors: &[Vec<f64>], out_dim: usize) -> Result<Projection> {
    let n = vectors.len();
    if n == 0 {
        return Err(Error::Empty("no vectors to project".into()));
    }
    let dim = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    if out_dim == 0 || out_dim > dim {
        return Err(Error::Config(format!("cannot project {dim}-dimensional vectors to {out_dim} dimensions")));
    }
    let mean: Vec<f64> = (0..dim).map(|j| vectors.iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
    let x = DMatrix::from_fn(n, dim, |i, j| vectors[i][j] - mean[j]);
    let cov = x.transpose() * &x / n as f64;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut components = Vec::with_capacity(out_dim);
    let mut explained_variance = Vec::with_capacity(out_dim);
    for &c in &order[..out_dim] {
        let mut axis: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        let lead = axis.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if lead < 0.0 {
            axis.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(axis);
        explained_variance.push(eig.eigenvalues[c].max(0.0));
    }
    let coords = (0..n)
        .map(|i| {
            components
                .iter()
                .map(|axis| (0..dim).map(|j| x[(i, j)] * axis[j]).sum())
                .collect()
        })
        .collect();
    Ok(Projection { coords, explained_variance, components })
}
