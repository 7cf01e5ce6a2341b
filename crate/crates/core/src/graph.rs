//! Top-k sparsification of coefficient matrices and affinity construction.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::solvers::CoefficientMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsifyParams {
    /// Coefficients retained per column.
    pub k: usize,
    /// Drop the self-coefficient before ranking.
    pub zero_diagonal: bool,
}

impl SparsifyParams {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            zero_diagonal: true,
        }
    }

    /// Largest `k` that is valid for `n` samples.
    pub fn max_k(n: usize, zero_diagonal: bool) -> usize {
        if zero_diagonal {
            n.saturating_sub(1)
        } else {
            n
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let max = Self::max_k(n, self.zero_diagonal);
        if self.k < 1 || self.k > max {
            return Err(Error::Parameter(format!(
                "k must lie in [1, {max}] for n = {n} (zero_diagonal = {}), got {}",
                self.zero_diagonal, self.k
            )));
        }
        Ok(())
    }
}

/// Keeps the `k` largest magnitudes of each column as absolute values.
///
/// Ties at the `k`-th magnitude go to the lowest row index. Zero entries are
/// never counted as retained, so a column with fewer than `k` nonzeros keeps
/// all of them.
pub fn sparsify_topk(c: &CoefficientMatrix, params: &SparsifyParams) -> Result<CoefficientMatrix> {
    let values = c.as_matrix();
    let n = values.nrows();
    params.validate(n)?;

    let columns: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut entries: Vec<(usize, f64)> = values
                .column(j)
                .iter()
                .enumerate()
                .filter(|&(i, _)| !(params.zero_diagonal && i == j))
                .map(|(i, v)| (i, v.abs()))
                .filter(|&(_, v)| v > 0.0)
                .collect();
            entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            entries.truncate(params.k);
            entries
        })
        .collect();

    let mut out = DMatrix::zeros(n, n);
    for (j, entries) in columns.into_iter().enumerate() {
        for (i, v) in entries {
            out[(i, j)] = v;
        }
    }
    CoefficientMatrix::new(out, false)
}

/// Issues found while building a graph that do not stop the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphWarning {
    /// Nodes with no incident edge; only possible when a data column is zero.
    IsolatedNodes(Vec<usize>),
}

/// Symmetric nonnegative `n × n` affinity matrix.
#[derive(Debug, Clone)]
pub struct AffinityGraph {
    values: DMatrix<f64>,
    warnings: Vec<GraphWarning>,
}

impl AffinityGraph {
    /// Wraps a matrix that must be square, symmetric and nonnegative.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::Dimension(format!(
                "affinity must be square, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        let n = values.nrows();
        for j in 0..n {
            for i in 0..n {
                let v = values[(i, j)];
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Parameter(format!(
                        "affinity entry ({i}, {j}) = {v} is not finite and nonnegative"
                    )));
                }
                if v != values[(j, i)] {
                    return Err(Error::Parameter(format!(
                        "affinity is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let warnings = isolated_nodes(&values).into_iter().collect();
        Ok(Self { values, warnings })
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn warnings(&self) -> &[GraphWarning] {
        &self.warnings
    }
}

fn isolated_nodes(w: &DMatrix<f64>) -> Option<GraphWarning> {
    let isolated: Vec<usize> = (0..w.nrows())
        .filter(|&i| w.row(i).iter().all(|&v| v == 0.0))
        .collect();
    (!isolated.is_empty()).then_some(GraphWarning::IsolatedNodes(isolated))
}

/// `W = |Ĉ| + |Ĉ|ᵀ`.
pub fn build_affinity(c_hat: &CoefficientMatrix) -> AffinityGraph {
    let c = c_hat.as_matrix();
    let n = c.nrows();
    let mut values = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = c[(i, j)].abs() + c[(j, i)].abs();
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    let warnings = isolated_nodes(&values).into_iter().collect();
    AffinityGraph { values, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(rows: usize, data: &[f64]) -> CoefficientMatrix {
        CoefficientMatrix::new(DMatrix::from_row_slice(rows, rows, data), false).unwrap()
    }

    fn column_matrix(col: &[f64]) -> CoefficientMatrix {
        let n = col.len();
        let mut m = DMatrix::zeros(n, n);
        m.set_column(n - 1, &nalgebra::DVector::from_row_slice(col));
        CoefficientMatrix::new(m, false).unwrap()
    }

    #[test]
    fn keeps_two_largest_magnitudes() {
        // put the column at index 3 with diagonal entry 0.3 excluded from "involvement"
        let c = column_matrix(&[0.5, -0.9, 0.1, 0.3]);
        let p = SparsifyParams {
            k: 2,
            zero_diagonal: false,
        };
        let out = sparsify_topk(&c, &p).unwrap();
        let col: Vec<f64> = out.as_matrix().column(3).iter().copied().collect();
        assert_eq!(col, vec![0.5, 0.9, 0.0, 0.0]);
    }

    #[test]
    fn tie_goes_to_lowest_row() {
        let c = column_matrix(&[0.4, 0.4, 0.4, 0.1]);
        let p = SparsifyParams {
            k: 2,
            zero_diagonal: false,
        };
        let out = sparsify_topk(&c, &p).unwrap();
        let col: Vec<f64> = out.as_matrix().column(3).iter().copied().collect();
        assert_eq!(col, vec![0.4, 0.4, 0.0, 0.0]);
    }

    #[test]
    fn full_k_is_absolute_value() {
        let c = coeffs(3, &[1.0, -2.0, 3.0, -4.0, 5.0, -6.0, 7.0, -8.0, 9.0]);
        let p = SparsifyParams {
            k: 3,
            zero_diagonal: false,
        };
        let out = sparsify_topk(&c, &p).unwrap();
        assert_eq!(out.as_matrix(), &c.as_matrix().abs());
    }

    #[test]
    fn diagonal_is_dropped_by_default() {
        let c = coeffs(3, &[9.0, 1.0, 2.0, 1.0, 9.0, 3.0, 2.0, 3.0, 9.0]);
        let out = sparsify_topk(&c, &SparsifyParams::new(1)).unwrap();
        let m = out.as_matrix();
        assert_eq!((m[(0, 0)], m[(1, 1)], m[(2, 2)]), (0.0, 0.0, 0.0));
        assert_eq!(m[(2, 0)], 2.0);
        assert_eq!(m[(2, 1)], 3.0);
        assert_eq!(m[(1, 2)], 3.0);
    }

    #[test]
    fn k_range_is_checked() {
        let c = coeffs(3, &[0.0; 9]);
        assert!(sparsify_topk(&c, &SparsifyParams::new(0)).is_err());
        assert!(sparsify_topk(&c, &SparsifyParams::new(3)).is_err());
        let p = SparsifyParams {
            k: 3,
            zero_diagonal: false,
        };
        assert!(sparsify_topk(&c, &p).is_ok());
        let p = SparsifyParams {
            k: 4,
            zero_diagonal: false,
        };
        assert!(sparsify_topk(&c, &p).is_err());
    }

    #[test]
    fn zero_coefficients_warn_on_every_node() {
        let w = build_affinity(&coeffs(3, &[0.0; 9]));
        assert_eq!(w.as_matrix().amax(), 0.0);
        assert_eq!(w.warnings(), &[GraphWarning::IsolatedNodes(vec![0, 1, 2])]);
    }

    #[test]
    fn single_entry_is_mirrored() {
        let w = build_affinity(&coeffs(3, &[0.0, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        let m = w.as_matrix();
        assert_eq!(m[(0, 1)], 0.9);
        assert_eq!(m[(1, 0)], 0.9);
        assert_eq!(m.sum(), 1.8);
        assert_eq!(w.warnings(), &[GraphWarning::IsolatedNodes(vec![2])]);
    }

    #[test]
    fn both_directions_are_summed() {
        let w = build_affinity(&coeffs(2, &[0.0, 0.3, 0.5, 0.0]));
        assert_eq!(w.as_matrix()[(0, 1)], 0.8);
        assert_eq!(w.as_matrix()[(1, 0)], 0.8);
        assert!(w.warnings().is_empty());
    }

    #[test]
    fn affinity_constructor_validates() {
        assert!(AffinityGraph::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0])).is_err());
        assert!(
            AffinityGraph::new(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0])).is_err()
        );
        assert!(AffinityGraph::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).is_ok());
    }
}
