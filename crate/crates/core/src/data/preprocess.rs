use nalgebra::{DMatrix, DVector};

use crate::solvers::{thin_svd, DataMatrix};
use crate::{Error, Result};

/// Scales every nonzero column to unit Euclidean norm.
pub fn normalize_columns(y: &DataMatrix) -> DataMatrix {
    let mut values = y.as_matrix().clone();
    for mut col in values.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    DataMatrix::new(values).expect("scaling preserves shape and finiteness")
}

/// Principal directions of mean-centered data.
#[derive(Debug, Clone)]
pub struct Pca {
    /// Feature means, length `m`.
    pub mean: DVector<f64>,
    /// `m × dim`, orthonormal columns.
    pub components: DMatrix<f64>,
}

impl Pca {
    pub fn fit(y: &DataMatrix, dim: usize) -> Result<Self> {
        let (m, n) = (y.nrows(), y.ncols());
        if dim < 1 || dim > m.min(n) {
            return Err(Error::Parameter(format!(
                "PCA dimension must lie in [1, {}], got {dim}",
                m.min(n)
            )));
        }
        let mean = y.as_matrix().column_mean();
        let centered = center(y.as_matrix(), &mean);
        // rank_eps 0 keeps every positive direction; pad with an orthonormal
        // completion when the centered data has rank < dim
        let f = thin_svd(&DataMatrix::new(centered)?, 0.0)?;
        let mut components = DMatrix::zeros(m, dim);
        let take = f.rank().min(dim);
        components
            .columns_mut(0, take)
            .copy_from(&f.left_vectors.columns(0, take));
        if take < dim {
            complete_basis(&mut components, take);
        }
        Ok(Self { mean, components })
    }

    /// `dim × n` scores `Wᵀ (Y − μ)`.
    pub fn project(&self, y: &DataMatrix) -> Result<DataMatrix> {
        if y.nrows() != self.mean.len() {
            return Err(Error::Dimension(format!(
                "PCA fitted on {} features, got {}",
                self.mean.len(),
                y.nrows()
            )));
        }
        DataMatrix::new(self.components.tr_mul(&center(y.as_matrix(), &self.mean)))
    }

    /// `W · scores + μ`.
    pub fn reconstruct(&self, scores: &DataMatrix) -> DMatrix<f64> {
        let mut out = &self.components * scores.as_matrix();
        for mut col in out.column_iter_mut() {
            col += &self.mean;
        }
        out
    }
}

fn center(y: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut c = y.clone();
    for mut col in c.column_iter_mut() {
        col -= mean;
    }
    c
}

/// Fills columns `from..` with unit vectors orthogonal to the earlier ones.
fn complete_basis(q: &mut DMatrix<f64>, from: usize) {
    let m = q.nrows();
    let mut next = from;
    for e in 0..m {
        if next == q.ncols() {
            break;
        }
        let mut v = DVector::zeros(m);
        v[e] = 1.0;
        for _ in 0..2 {
            for c in 0..next {
                let proj = q.column(c).dot(&v);
                v -= q.column(c) * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            q.set_column(next, &(v / norm));
            next += 1;
        }
    }
}

/// Projects `y` onto its top `dim` principal directions.
pub fn pca_project(y: &DataMatrix, dim: usize) -> Result<DataMatrix> {
    Pca::fit(y, dim)?.project(y)
}
