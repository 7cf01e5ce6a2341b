//! Normalized spectral clustering: `L_sym = I − D^{-1/2} W D^{-1/2}`, the
//! eigenvectors of its `u` smallest eigenvalues as row-normalized
//! coordinates, then k-means on the rows.

mod kmeans;

pub use kmeans::kmeans;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::graph::AffinityGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub num_clusters: usize,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub seed: u64,
}

impl SpectralParams {
    pub fn new(num_clusters: usize, seed: u64) -> Self {
        Self {
            num_clusters,
            kmeans_restarts: 20,
            kmeans_max_iters: 300,
            seed,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.num_clusters < 1 || self.num_clusters > n {
            return Err(Error::Parameter(format!(
                "number of clusters must lie in [1, {n}], got {}",
                self.num_clusters
            )));
        }
        if self.kmeans_restarts < 1 || self.kmeans_max_iters < 1 {
            return Err(Error::Parameter(
                "k-means restarts and iteration limit must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Cluster label per sample, each in `[0, num_clusters)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    num_clusters: usize,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, num_clusters: usize) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&l| l >= num_clusters) {
            return Err(Error::Parameter(format!(
                "label {bad} out of range for {num_clusters} clusters"
            )));
        }
        Ok(Self {
            labels,
            num_clusters,
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Symmetric normalized Laplacian. Isolated nodes get a unit diagonal and
/// no off-diagonal entries.
pub fn normalized_laplacian(w: &AffinityGraph) -> DMatrix<f64> {
    let w = w.as_matrix();
    let n = w.nrows();
    let inv_sqrt: Vec<f64> = w
        .row_iter()
        .map(|row| {
            let d = row.sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut l = DMatrix::from_fn(n, n, |i, j| -inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]);
    for i in 0..n {
        l[(i, i)] += 1.0;
    }
    // exact symmetry despite rounding in the products
    for j in 0..n {
        for i in (j + 1)..n {
            l[(j, i)] = l[(i, j)];
        }
    }
    l
}

/// Eigenvalues (ascending) and matching eigenvectors of a symmetric matrix.
pub(crate) fn sorted_eigen(a: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 100 * n.max(10)).ok_or_else(|| {
        Error::Numerical(format!(
            "symmetric eigensolver did not converge on {n}x{n} matrix"
        ))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    Ok((values, vectors))
}

/// `n × u` embedding: bottom `u` eigenvectors of `L_sym`, rows scaled to
/// unit length (zero rows stay zero).
pub fn spectral_embed(w: &AffinityGraph, u: usize) -> Result<DMatrix<f64>> {
    let n = w.size();
    if u < 1 || u > n {
        return Err(Error::Parameter(format!(
            "embedding dimension must lie in [1, {n}], got {u}"
        )));
    }
    let (_, vectors) = sorted_eigen(normalized_laplacian(w))?;
    let mut embedding = vectors.columns(0, u).into_owned();
    for mut row in embedding.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    Ok(embedding)
}

/// Full spectral clustering of an affinity graph.
pub fn spectral_cluster(w: &AffinityGraph, params: &SpectralParams) -> Result<ClusterAssignment> {
    params.validate(w.size())?;
    let embedding = spectral_embed(w, params.num_clusters)?;
    kmeans(&embedding, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, data: &[f64]) -> AffinityGraph {
        AffinityGraph::new(DMatrix::from_row_slice(n, n, data)).unwrap()
    }

    fn block_diagonal(sizes: &[usize]) -> AffinityGraph {
        let n: usize = sizes.iter().sum();
        let mut w = DMatrix::zeros(n, n);
        let mut start = 0;
        for &s in sizes {
            for i in start..start + s {
                for j in start..start + s {
                    if i != j {
                        w[(i, j)] = 1.0;
                    }
                }
            }
            start += s;
        }
        AffinityGraph::new(w).unwrap()
    }

    #[test]
    fn empty_graph_laplacian_is_identity() {
        let l = normalized_laplacian(&graph(3, &[0.0; 9]));
        assert_eq!(l, DMatrix::identity(3, 3));
    }

    #[test]
    fn two_node_complete_graph() {
        let l = normalized_laplacian(&graph(2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn block_rows_coincide_and_blocks_are_orthogonal() {
        let w = block_diagonal(&[3, 4, 2]);
        let e = spectral_embed(&w, 3).unwrap();
        let blocks = [0..3, 3..7, 7..9];
        for (b, range) in blocks.iter().enumerate() {
            let anchor = e.row(range.start).into_owned();
            for i in range.clone() {
                assert!((e.row(i) - &anchor).amax() < 1e-8);
            }
            for other in blocks.iter().skip(b + 1) {
                let dot = anchor.dot(&e.row(other.start));
                assert!(dot.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn single_column_rows_have_equal_magnitude() {
        let w = graph(3, &[0.0, 1.0, 2.0, 1.0, 0.0, 0.5, 2.0, 0.5, 0.0]);
        let e = spectral_embed(&w, 1).unwrap();
        assert_eq!(e.ncols(), 1);
        for v in e.iter() {
            assert!((v.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_blocks_are_recovered() {
        let w = block_diagonal(&[5, 5, 5]);
        let a = spectral_cluster(&w, &SpectralParams::new(3, 1)).unwrap();
        let l = a.labels();
        for b in 0..3 {
            assert!(l[b * 5..b * 5 + 5].iter().all(|&x| x == l[b * 5]));
        }
        assert_ne!(l[0], l[5]);
        assert_ne!(l[5], l[10]);
        assert_ne!(l[0], l[10]);
    }

    #[test]
    fn empty_graph_single_cluster() {
        let a = spectral_cluster(&graph(3, &[0.0; 9]), &SpectralParams::new(1, 0)).unwrap();
        assert_eq!(a.labels(), &[0, 0, 0]);
    }

    #[test]
    fn too_many_clusters_is_rejected() {
        let w = graph(2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(spectral_cluster(&w, &SpectralParams::new(3, 0)).is_err());
        assert!(spectral_embed(&w, 0).is_err());
    }

    #[test]
    fn weakly_linked_blocks_are_separated() {
        let base = block_diagonal(&[6, 6]);
        let mut w = base.as_matrix().clone();
        for i in 0..6 {
            for j in 6..12 {
                w[(i, j)] = 1e-3;
                w[(j, i)] = 1e-3;
            }
        }
        let a =
            spectral_cluster(&AffinityGraph::new(w).unwrap(), &SpectralParams::new(2, 3)).unwrap();
        let l = a.labels();
        assert!(l[..6].iter().all(|&x| x == l[0]));
        assert!(l[6..].iter().all(|&x| x == l[6]));
        assert_ne!(l[0], l[6]);
    }
}
