use nalgebra::{DMatrix, DVector, SVD};

use super::DataMatrix;
use crate::{Error, Result};

/// Thin SVD `Y = U Λ Vᵀ` restricted to the numerically nonzero spectrum.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `m × r`, orthonormal columns.
    pub left_vectors: DMatrix<f64>,
    /// `r` values, descending, all positive.
    pub singular_values: DVector<f64>,
    /// `n × r`, orthonormal columns.
    pub right_vectors: DMatrix<f64>,
    /// Absolute cutoff that was applied (`rank_eps · λ₁`).
    pub rank_tolerance: f64,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `U Λ Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.left_vectors.clone();
        for (c, s) in self.singular_values.iter().enumerate() {
            scaled.column_mut(c).scale_mut(*s);
        }
        scaled * self.right_vectors.transpose()
    }
}

/// Thin SVD of `y` keeping singular values strictly above `rank_eps · λ₁`.
pub fn thin_svd(y: &DataMatrix, rank_eps: f64) -> Result<SvdFactors> {
    if !(0.0..1.0).contains(&rank_eps) {
        return Err(Error::Parameter(format!(
            "rank_eps must lie in [0, 1), got {rank_eps}"
        )));
    }
    factorize(y.as_matrix(), rank_eps)
}

pub(crate) fn factorize(y: &DMatrix<f64>, rank_eps: f64) -> Result<SvdFactors> {
    super::check_finite(y)?;
    let (m, n) = y.shape();
    let svd = SVD::try_new(y.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical(format!("SVD of {m}x{n} matrix did not converge")))?;
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");
    let values = svd.singular_values;

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let top = order.first().map_or(0.0, |&i| values[i]);
    let rank_tolerance = rank_eps * top;
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| values[i] > rank_tolerance && values[i] > 0.0)
        .collect();

    let r = kept.len();
    let mut left_vectors = DMatrix::zeros(m, r);
    let mut right_vectors = DMatrix::zeros(n, r);
    let mut singular_values = DVector::zeros(r);
    for (c, &i) in kept.iter().enumerate() {
        left_vectors.set_column(c, &u.column(i));
        right_vectors.set_column(c, &v_t.row(i).transpose());
        singular_values[c] = values[i];
    }
    Ok(SvdFactors {
        left_vectors,
        singular_values,
        right_vectors,
        rank_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn orthonormality_error(q: &DMatrix<f64>) -> f64 {
        let g = q.transpose() * q;
        (g - DMatrix::identity(q.ncols(), q.ncols())).amax()
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let y = DataMatrix::new(DMatrix::zeros(3, 4)).unwrap();
        let f = thin_svd(&y, 1e-12).unwrap();
        assert_eq!(f.rank(), 0);
        assert_eq!(f.left_vectors.shape(), (3, 0));
        assert_eq!(f.right_vectors.shape(), (4, 0));
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let y = DataMatrix::new(DMatrix::identity(4, 4)).unwrap();
        let f = thin_svd(&y, 1e-12).unwrap();
        assert_eq!(f.rank(), 4);
        for s in f.singular_values.iter() {
            assert!((s - 1.0).abs() < 1e-14);
        }
        // U = V and each column is ± a unit coordinate vector
        for c in 0..4 {
            let col = f.right_vectors.column(c);
            let big = col.iter().filter(|v| (v.abs() - 1.0).abs() < 1e-12).count();
            assert_eq!(big, 1);
        }
        assert!((&f.left_vectors - &f.right_vectors).amax() < 1e-12);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(m, n) in &[(5, 8), (8, 5), (6, 6), (1, 4)] {
            let y = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
            let f = thin_svd(&DataMatrix::new(y.clone()).unwrap(), 1e-12).unwrap();
            let err = (&y - f.reconstruct()).norm();
            assert!(err <= 1e-8 * y.norm().max(1.0), "{m}x{n}: {err}");
            assert!(orthonormality_error(&f.left_vectors) < 1e-10);
            assert!(orthonormality_error(&f.right_vectors) < 1e-10);
            let s = f.singular_values.as_slice();
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
            assert!(s.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn rank_deficient_input_is_truncated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(6, 2, |_, _| rng.random_range(-1.0..1.0));
        let b = DMatrix::from_fn(2, 9, |_, _| rng.random_range(-1.0..1.0));
        let y = DataMatrix::new(a * b).unwrap();
        let f = thin_svd(&y, 1e-12).unwrap();
        assert_eq!(f.rank(), 2);
    }

    #[test]
    fn rejects_bad_rank_eps() {
        let y = DataMatrix::new(DMatrix::identity(2, 2)).unwrap();
        assert!(thin_svd(&y, 1.5).is_err());
        assert!(thin_svd(&y, -0.1).is_err());
    }
}
