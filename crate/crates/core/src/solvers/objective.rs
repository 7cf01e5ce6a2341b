//! Objective values of the three coefficient problems, for optimality checks.

use nalgebra::{DMatrix, DVectorView};

/// `τ/2 ‖Y − YC‖²_F + ½ ‖C‖²_F`.
pub fn fssc_objective(y: &DMatrix<f64>, c: &DMatrix<f64>, tau: f64) -> f64 {
    let residual = y - y * c;
    0.5 * tau * residual.norm_squared() + 0.5 * c.norm_squared()
}

/// `‖C‖_* + τ/2 ‖Y − YC‖²_F`.
pub fn lrsc_objective(y: &DMatrix<f64>, c: &DMatrix<f64>, tau: f64) -> f64 {
    let nuclear: f64 = c.singular_values().iter().sum();
    let residual = y - y * c;
    nuclear + 0.5 * tau * residual.norm_squared()
}

/// `½ ‖yᵢ − Yᵢc‖² + τ‖c‖²` with `Yᵢ` = `Y` minus column `i`.
pub fn l2graph_column_objective(
    y: &DMatrix<f64>,
    i: usize,
    c: DVectorView<'_, f64>,
    tau: f64,
) -> f64 {
    let mut yi = y.clone();
    yi.column_mut(i).fill(0.0);
    let residual = y.column(i) - yi * c;
    0.5 * residual.norm_squared() + tau * c.norm_squared()
}
