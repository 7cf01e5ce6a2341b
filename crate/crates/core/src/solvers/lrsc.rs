use super::{spectral_product, svd::factorize, CoefficientMatrix, DataMatrix, SolverParams};
use crate::Result;

/// Minimizer of `|δ| + τ/2 (1 − δ)² λ²`: `1 − 1/(τλ²)` above the threshold
/// `λ > 1/√τ`, zero otherwise.
pub fn lrsc_shrinkage(lambda: f64, tau: f64) -> f64 {
    let t = tau * lambda * lambda;
    if t > 1.0 {
        1.0 - 1.0 / t
    } else {
        0.0
    }
}

/// LRSC coefficient matrix: the symmetric minimizer of
/// `‖C‖_* + τ/2 ‖Y − YC‖²_F`.
pub fn lrsc_coefficients(y: &DataMatrix, params: &SolverParams) -> Result<CoefficientMatrix> {
    params.validate()?;
    let f = factorize(y.as_matrix(), params.rank_eps)?;
    let weights: Vec<f64> = f
        .singular_values
        .iter()
        .map(|&s| lrsc_shrinkage(s, params.tau))
        .collect();
    Ok(CoefficientMatrix::from_parts(
        spectral_product(&f.right_vectors, &weights),
        true,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn below_threshold_is_zero() {
        // all singular values 0.1 ≤ 1/√τ = 0.5
        let y = DataMatrix::new(DMatrix::<f64>::identity(5, 3) * 0.1).unwrap();
        let c = lrsc_coefficients(&y, &SolverParams::new(4.0).unwrap()).unwrap();
        assert_eq!(c.as_matrix().amax(), 0.0);
        assert_eq!(lrsc_shrinkage(0.5, 4.0), 0.0);
    }

    #[test]
    fn orthonormal_columns() {
        let y = DataMatrix::new(DMatrix::identity(5, 3)).unwrap();
        let c = lrsc_coefficients(&y, &SolverParams::new(4.0).unwrap()).unwrap();
        let expected = DMatrix::<f64>::identity(3, 3) * 0.75;
        assert!((c.as_matrix() - expected).amax() < 1e-12);
    }

    #[test]
    fn shrinkage_matches_grid_search() {
        for &(lambda, tau) in &[(0.2, 10.0), (0.5, 10.0), (1.3, 10.0), (3.0, 0.5)] {
            let obj = |d: f64| d.abs() + 0.5 * tau * (1.0 - d).powi(2) * lambda * lambda;
            let oracle = (0..=2_000_000)
                .map(|i| -0.5 + i as f64 * 1e-6)
                .min_by(|a, b| obj(*a).total_cmp(&obj(*b)))
                .unwrap();
            assert!((lrsc_shrinkage(lambda, tau) - oracle).abs() <= 1e-5);
        }
    }
}
