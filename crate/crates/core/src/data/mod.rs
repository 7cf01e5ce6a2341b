//! Datasets: file loaders, preprocessing and a union-of-subspaces generator.

mod io;
mod preprocess;
mod synthetic;

pub use io::{load_labels, load_matrix, save_labels, save_matrix, MatrixFormat, BINARY_MAGIC};
pub use preprocess::{normalize_columns, pca_project, Pca};
pub use synthetic::{generate_synthetic, subspace_bases, SyntheticSpec};

use crate::metrics::GroundTruth;
use crate::solvers::DataMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub matrix: DataMatrix,
    pub truth: GroundTruth,
    pub name: String,
}

impl Dataset {
    pub fn new(matrix: DataMatrix, truth: GroundTruth, name: impl Into<String>) -> Result<Self> {
        if truth.len() != matrix.ncols() {
            return Err(Error::LengthMismatch {
                left: matrix.ncols(),
                right: truth.len(),
            });
        }
        Ok(Self {
            matrix,
            truth,
            name: name.into(),
        })
    }
}
