//! Self-representation coefficient solvers.
//!
//! All three solvers are closed form. FSSC and LRSC share the same structure:
//! with `Y = UΛVᵀ` the optimal symmetric `C` is `V diag(δ(λᵢ)) Vᵀ` for a
//! scalar shrinkage `δ` applied to each singular value. L2-graph solves one
//! ridge problem per sample with that sample removed from the dictionary.

mod fssc;
mod l2graph;
mod lrsc;
pub mod objective;
mod svd;
mod trace;

pub use fssc::{fssc_coefficients, fssc_coefficients_with, fssc_shrinkage, FsscMethod};
pub use l2graph::l2graph_coefficients;
pub use lrsc::{lrsc_coefficients, lrsc_shrinkage};
pub use svd::{thin_svd, SvdFactors};
pub use trace::{trace_inequality_slack, von_neumann_lower_bound};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default relative threshold below which singular values count as zero.
pub const DEFAULT_RANK_EPS: f64 = 1e-12;

/// An `m × n` data matrix whose columns are samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(DMatrix<f64>);

impl DataMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let (m, n) = values.shape();
        if m < 1 || n < 2 {
            return Err(Error::Dimension(format!(
                "data matrix must have at least 1 row and 2 columns, got {m}x{n}"
            )));
        }
        check_finite(&values)?;
        Ok(Self(values))
    }

    /// Feature dimension `m`.
    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    /// Number of samples `n`.
    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

pub(crate) fn check_finite(values: &DMatrix<f64>) -> Result<()> {
    // column-major walk
    for (col, column) in values.column_iter().enumerate() {
        if let Some(row) = column.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }
    Ok(())
}

/// An `n × n` representation matrix; column `i` holds sample `i`'s weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    values: DMatrix<f64>,
    symmetric: bool,
}

impl CoefficientMatrix {
    /// Wraps a square matrix. When `symmetric` is set the matrix must be
    /// symmetric to `1e-9 · max(1, ‖C‖∞)`.
    pub fn new(values: DMatrix<f64>, symmetric: bool) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::Dimension(format!(
                "coefficient matrix must be square, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        check_finite(&values)?;
        if symmetric {
            let asym = asymmetry(&values);
            let scale = values.amax().max(1.0);
            if asym > 1e-9 * scale {
                return Err(Error::Numerical(format!(
                    "matrix flagged symmetric has asymmetry {asym:e}"
                )));
            }
        }
        Ok(Self { values, symmetric })
    }

    pub(crate) fn from_parts(values: DMatrix<f64>, symmetric: bool) -> Self {
        Self { values, symmetric }
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }
}

/// Largest absolute entry of `A − Aᵀ`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Replaces `a` with `(a + aᵀ) / 2`, making it exactly symmetric.
pub(crate) fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Balance between reconstruction and regularization.
    pub tau: f64,
    /// Singular values `≤ rank_eps · λ₁` are treated as zero.
    pub rank_eps: f64,
}

impl SolverParams {
    pub fn new(tau: f64) -> Result<Self> {
        let params = Self {
            tau,
            rank_eps: DEFAULT_RANK_EPS,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Parameter(format!(
                "tau must be positive and finite, got {}",
                self.tau
            )));
        }
        if !(0.0..1.0).contains(&self.rank_eps) {
            return Err(Error::Parameter(format!(
                "rank_eps must lie in [0, 1), got {}",
                self.rank_eps
            )));
        }
        Ok(())
    }
}

/// `V₁ diag(weights) V₁ᵀ`, made exactly symmetric.
pub(crate) fn spectral_product(right: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let n = right.nrows();
    let kept: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] != 0.0).collect();
    if kept.is_empty() {
        return DMatrix::zeros(n, n);
    }
    let v1 = right.select_columns(&kept);
    let mut scaled = v1.clone();
    for (c, &i) in kept.iter().enumerate() {
        scaled.column_mut(c).scale_mut(weights[i]);
    }
    let mut c = scaled * v1.transpose();
    symmetrize(&mut c);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_matrix_rejects_single_sample() {
        assert!(matches!(
            DataMatrix::new(DMatrix::zeros(3, 1)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn data_matrix_reports_nan_location() {
        let mut y = DMatrix::zeros(3, 4);
        y[(2, 1)] = f64::NAN;
        match DataMatrix::new(y) {
            Err(Error::NonFinite { row, col }) => assert_eq!((row, col), (2, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn solver_params_validation() {
        assert!(SolverParams::new(0.0).is_err());
        assert!(SolverParams::new(-1.0).is_err());
        assert!(SolverParams::new(f64::INFINITY).is_err());
        let bad = SolverParams {
            tau: 1.0,
            rank_eps: 1.0,
        };
        assert!(bad.validate().is_err());
        assert!(SolverParams::new(0.5).is_ok());
    }

    #[test]
    fn symmetric_flag_is_checked() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.5, 1.0]);
        assert!(CoefficientMatrix::new(a.clone(), true).is_err());
        assert!(CoefficientMatrix::new(a, false).is_ok());
    }
}
