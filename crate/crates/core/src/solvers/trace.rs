use nalgebra::DMatrix;

fn descending_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `Σᵢ σᵢ(X) σ_{n−i+1}(Z)`: singular values of `X` descending paired with
/// those of `Z` ascending. A lower bound on `trace(XZ)` for symmetric
/// positive semidefinite `X`, `Z`.
pub fn von_neumann_lower_bound(x: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    let sx = descending_singular_values(x);
    let sz = descending_singular_values(z);
    sx.iter().zip(sz.iter().rev()).map(|(a, b)| a * b).sum()
}

/// `trace(XZ)` minus [`von_neumann_lower_bound`]; nonnegative up to rounding.
pub fn trace_inequality_slack(x: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    (x * z).trace() - von_neumann_lower_bound(x, z)
}
