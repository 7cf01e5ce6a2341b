use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::metrics::GroundTruth;
use crate::solvers::DataMatrix;
use crate::{Error, Result};

/// Parameters of a union of independent linear subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub num_subspaces: usize,
    pub points_per_subspace: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let Self {
            ambient_dim: m,
            subspace_dim: d,
            num_subspaces: u,
            points_per_subspace: p,
            noise_sigma,
            ..
        } = *self;
        if d < 1 || d >= m {
            return Err(Error::Parameter(format!(
                "subspace dimension must satisfy 1 ≤ d < m, got d = {d}, m = {m}"
            )));
        }
        if u < 1 || u * d > m {
            return Err(Error::Parameter(format!(
                "{u} independent {d}-dimensional subspaces do not fit in R^{m}"
            )));
        }
        if p < d {
            return Err(Error::Parameter(format!(
                "need at least d = {d} points per subspace, got {p}"
            )));
        }
        if u * p < 2 {
            return Err(Error::Parameter("need at least two samples".into()));
        }
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(Error::Parameter(format!(
                "noise sigma must be finite and nonnegative, got {noise_sigma}"
            )));
        }
        Ok(())
    }

    pub fn num_samples(&self) -> usize {
        self.num_subspaces * self.points_per_subspace
    }
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Orthonormal bases (`m × d` each) for the subspaces of `spec`: disjoint
/// coordinate blocks of a random rotation, drawn first from the seeded stream.
pub fn subspace_bases(spec: &SyntheticSpec) -> Result<Vec<DMatrix<f64>>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(bases_from(spec, &mut rng))
}

fn bases_from(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<DMatrix<f64>> {
    let m = spec.ambient_dim;
    let d = spec.subspace_dim;
    let rotation = gaussian_matrix(m, m, rng).qr().q();
    (0..spec.num_subspaces)
        .map(|s| rotation.columns(s * d, d).into_owned())
        .collect()
}

/// Samples `points_per_subspace` unit-norm points from each subspace, adds
/// isotropic Gaussian noise and labels every column by its subspace.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bases = bases_from(spec, &mut rng);
    let m = spec.ambient_dim;
    let n = spec.num_samples();
    let mut y = DMatrix::zeros(m, n);
    let mut labels = Vec::with_capacity(n);
    for (s, basis) in bases.iter().enumerate() {
        for p in 0..spec.points_per_subspace {
            let coeffs =
                DVector::from_fn(spec.subspace_dim, |_, _| StandardNormal.sample(&mut rng));
            let mut x = basis * coeffs;
            let norm = x.norm();
            if norm > 0.0 {
                x /= norm;
            }
            if spec.noise_sigma > 0.0 {
                for v in x.iter_mut() {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    *v += spec.noise_sigma * e;
                }
            }
            y.set_column(s * spec.points_per_subspace + p, &x);
            labels.push(s);
        }
    }
    let name = format!(
        "synthetic-m{}-d{}-u{}-p{}-s{}",
        spec.ambient_dim,
        spec.subspace_dim,
        spec.num_subspaces,
        spec.points_per_subspace,
        spec.seed
    );
    Dataset::new(
        DataMatrix::new(y)?,
        GroundTruth::new(labels, spec.num_subspaces)?,
        name,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SyntheticSpec {
        SyntheticSpec {
            ambient_dim: 20,
            subspace_dim: 3,
            num_subspaces: 4,
            points_per_subspace: 10,
            noise_sigma: 0.0,
            seed: 42,
        }
    }

    #[test]
    fn noiseless_blocks_have_rank_d() {
        let data = generate_synthetic(&spec()).unwrap();
        for s in 0..4 {
            let block = data.matrix.as_matrix().columns(s * 10, 10).into_owned();
            assert_eq!(block.rank(1e-10), 3);
        }
        for c in data.matrix.as_matrix().column_iter() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_subspace_labels() {
        let mut s = spec();
        s.num_subspaces = 1;
        let data = generate_synthetic(&s).unwrap();
        assert!(data.truth.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let mut s = spec();
        s.noise_sigma = 0.05;
        let a = generate_synthetic(&s).unwrap();
        let b = generate_synthetic(&s).unwrap();
        assert_eq!(a, b);
        s.seed += 1;
        assert_ne!(a.matrix, generate_synthetic(&s).unwrap().matrix);
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec();
        s.subspace_dim = 20;
        assert!(generate_synthetic(&s).is_err());
        let mut s = spec();
        s.num_subspaces = 7;
        assert!(generate_synthetic(&s).is_err());
        let mut s = spec();
        s.points_per_subspace = 2;
        assert!(generate_synthetic(&s).is_err());
        let mut s = spec();
        s.noise_sigma = -1.0;
        assert!(generate_synthetic(&s).is_err());
    }

    #[test]
    fn principal_angles_are_wide() {
        let bases = subspace_bases(&spec()).unwrap();
        for a in 0..bases.len() {
            for b in (a + 1)..bases.len() {
                // cos of the smallest principal angle = largest singular value of AᵀB
                let cos_max = (bases[a].transpose() * &bases[b]).singular_values().max();
                assert!(cos_max <= 10f64.to_radians().cos());
            }
        }
    }
}
