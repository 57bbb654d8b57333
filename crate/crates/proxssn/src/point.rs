//! Iterate storage and small vector helpers.

use nalgebra::DMatrix;

/// Dense column-major iterate `X` in `R^{n x p}`; the columns are the
/// manifold coordinates. Vector-valued problems use `p = 1`.
pub type MatPoint = DMatrix<f64>;

/// Builds an `n x 1` point from a slice.
pub fn col_point(data: &[f64]) -> MatPoint {
    MatPoint::from_column_slice(data.len(), 1, data)
}

/// True when every entry is finite.
pub fn all_finite(x: &MatPoint) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Max column 2-norm, the `(2, infinity)` norm used to scale perturbations.
pub fn max_col_norm(x: &MatPoint) -> f64 {
    x.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}
