use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{CoefficientMatrix, DataMatrix, SolverParams};
use crate::{Error, Result};

/// L2-graph coefficients: column `i` minimizes
/// `½‖yᵢ − Yᵢc‖² + τ‖c‖²` where `Yᵢ` is `Y` with column `i` zeroed.
///
/// The regularizer carries no ½, so the normal equations are
/// `(YᵢᵀYᵢ + 2τI) cᵢ = Yᵢᵀyᵢ`. All `n` systems share one inverse: with
/// `P = (YᵀY + 2τI)⁻¹`, the leave-one-out solution is
/// `cᵢ[j] = −P[j,i] / P[i,i]` for `j ≠ i` and `cᵢ[i] = 0`.
///
/// When `normalize` is set every nonzero column is scaled to unit norm.
pub fn l2graph_coefficients(
    y: &DataMatrix,
    params: &SolverParams,
    normalize: bool,
) -> Result<CoefficientMatrix> {
    params.validate()?;
    let y = y.as_matrix();
    let n = y.ncols();
    let mut system = y.tr_mul(y);
    for i in 0..n {
        system[(i, i)] += 2.0 * params.tau;
    }
    let inverse = system
        .cholesky()
        .ok_or_else(|| Error::Numerical("YᵀY + 2τI is not positive definite".into()))?
        .inverse();

    let columns: Vec<DVector<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let pivot = inverse[(i, i)];
            let mut c = DVector::from_fn(n, |j, _| {
                if j == i {
                    0.0
                } else {
                    -inverse[(j, i)] / pivot
                }
            });
            if normalize {
                let norm = c.norm();
                if norm > 0.0 {
                    c /= norm;
                }
            }
            c
        })
        .collect();

    let c = DMatrix::from_columns(&columns);
    CoefficientMatrix::new(c, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct solve of column `i`'s own normal equations.
    fn column_oracle(y: &DMatrix<f64>, i: usize, tau: f64) -> DVector<f64> {
        let mut yi = y.clone();
        yi.column_mut(i).fill(0.0);
        let a = yi.tr_mul(&yi) + DMatrix::identity(y.ncols(), y.ncols()) * (2.0 * tau);
        let b = yi.tr_mul(&y.column(i));
        a.lu().solve(&b).unwrap()
    }

    #[test]
    fn duplicated_column_pair() {
        // y0 = y1 = e0, others orthogonal to e0
        let mut y = DMatrix::zeros(4, 4);
        y[(0, 0)] = 1.0;
        y[(0, 1)] = 1.0;
        y[(1, 2)] = 1.0;
        y[(2, 3)] = 1.0;
        let y = DataMatrix::new(y).unwrap();
        let p = SolverParams::new(0.5).unwrap();
        let raw = l2graph_coefficients(&y, &p, false).unwrap();
        let col = raw.as_matrix().column(0);
        assert!((col[1] - 0.5).abs() < 1e-12);
        assert_eq!(col[0], 0.0);
        assert!(col[2].abs() < 1e-14 && col[3].abs() < 1e-14);
        let oracle = column_oracle(y.as_matrix(), 0, 0.5);
        assert!((col - oracle).amax() < 1e-12);

        let unit = l2graph_coefficients(&y, &p, true).unwrap();
        assert!((unit.as_matrix()[(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn huge_tau_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = DMatrix::from_fn(5, 7, |_, _| rng.random_range(-1.0..1.0));
        let p = SolverParams::new(1e12).unwrap();
        let c = l2graph_coefficients(&DataMatrix::new(y).unwrap(), &p, false).unwrap();
        assert!(c.as_matrix().amax() < 1e-10);
    }

    #[test]
    fn random_columns_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = DMatrix::from_fn(6, 9, |_, _| rng.random_range(-1.0..1.0));
        let c = l2graph_coefficients(
            &DataMatrix::new(y.clone()).unwrap(),
            &SolverParams::new(1.0).unwrap(),
            false,
        )
        .unwrap();
        for i in 0..9 {
            let oracle = column_oracle(&y, i, 1.0);
            let got = c.as_matrix().column(i);
            assert!((got - &oracle).norm() <= 1e-8 * oracle.norm().max(1e-300));
            assert_eq!(got[i], 0.0);
        }
    }

    #[test]
    fn zero_column_stays_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut y = DMatrix::from_fn(4, 6, |_, _| rng.random_range(-1.0..1.0));
        y.column_mut(2).fill(0.0);
        let c = l2graph_coefficients(
            &DataMatrix::new(y).unwrap(),
            &SolverParams::new(0.3).unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(c.as_matrix().column(2).amax(), 0.0);
    }
}
