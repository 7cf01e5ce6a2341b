use nalgebra::DMatrix;

use super::{
    spectral_product, svd::factorize, symmetrize, CoefficientMatrix, DataMatrix, SolverParams,
};
use crate::{Error, Result};

/// Minimizer of `τ/2 (1 − δ)² λ² + ½ δ²`, i.e. `τλ² / (1 + τλ²)`.
///
/// Zero for `λ = 0`; always in `[0, 1)`.
pub fn fssc_shrinkage(lambda: f64, tau: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let t = tau * lambda * lambda;
    t / (1.0 + t)
}

/// How the FSSC closed form is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FsscMethod {
    /// Ridge solve when `n ≤ m`, SVD otherwise.
    #[default]
    Auto,
    /// `C = V₁ diag(δ) V₁ᵀ` from the thin SVD of `Y`.
    Svd,
    /// `C = (τYᵀY + I)⁻¹ τYᵀY` through a Cholesky factorization.
    Ridge,
}

/// FSSC coefficient matrix: the symmetric minimizer of
/// `τ/2 ‖Y − YC‖²_F + ½ ‖C‖²_F`.
pub fn fssc_coefficients(y: &DataMatrix, params: &SolverParams) -> Result<CoefficientMatrix> {
    fssc_coefficients_with(y, params, FsscMethod::Auto)
}

pub fn fssc_coefficients_with(
    y: &DataMatrix,
    params: &SolverParams,
    method: FsscMethod,
) -> Result<CoefficientMatrix> {
    params.validate()?;
    let method = match method {
        FsscMethod::Auto if y.ncols() <= y.nrows() => FsscMethod::Ridge,
        FsscMethod::Auto => FsscMethod::Svd,
        other => other,
    };
    let c = match method {
        FsscMethod::Ridge => ridge_form(y.as_matrix(), params.tau)?,
        _ => {
            let f = factorize(y.as_matrix(), params.rank_eps)?;
            let weights: Vec<f64> = f
                .singular_values
                .iter()
                .map(|&s| fssc_shrinkage(s, params.tau))
                .collect();
            spectral_product(&f.right_vectors, &weights)
        }
    };
    Ok(CoefficientMatrix::from_parts(c, true))
}

fn ridge_form(y: &DMatrix<f64>, tau: f64) -> Result<DMatrix<f64>> {
    let n = y.ncols();
    let gram = y.tr_mul(y) * tau;
    let system = &gram + DMatrix::<f64>::identity(n, n);
    let chol = system
        .cholesky()
        .ok_or_else(|| Error::Numerical("τYᵀY + I is not positive definite".into()))?;
    let mut c = chol.solve(&gram);
    symmetrize(&mut c);
    Ok(c)
}
