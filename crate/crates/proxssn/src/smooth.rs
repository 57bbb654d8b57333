//! Smooth part of a composite objective.

use crate::point::MatPoint;

/// Smooth objective `f` with gradient, Hessian action, and a Lipschitz
/// estimate for the gradient.
///
/// `hess_vec` must be the exact directional derivative of `gradient`; the
/// Newton system is built from it matrix-free. `lipschitz` only needs to be
/// an upper bound over the region the solver visits, it controls theory-mode
/// step sizes and the sufficient-decrease accounting.
pub trait SmoothFn: Send + Sync {
    fn value(&self, x: &MatPoint) -> f64;

    fn gradient(&self, x: &MatPoint) -> MatPoint;

    /// Action `hess f(x)[d]` of the Hessian at `x` on direction `d`.
    fn hess_vec(&self, x: &MatPoint, d: &MatPoint) -> MatPoint;

    /// Hessian action at a fixed base point, for repeated application
    /// inside Krylov solves. The default defers to [`SmoothFn::hess_vec`];
    /// implementations override it to hoist base-point products out of the
    /// per-direction cost. Must agree with `hess_vec` exactly.
    fn hess_at<'a>(&'a self, x: &MatPoint) -> Box<dyn Fn(&MatPoint) -> MatPoint + Send + Sync + 'a> {
        let x = x.clone();
        Box::new(move |d| self.hess_vec(&x, d))
    }

    /// Upper bound on the gradient's Lipschitz constant.
    fn lipschitz(&self) -> f64;
}

/// Plain quadratic `f(x) = 1/2 x^T Q x`, used by small fixed-point and
/// eigenvector tests.
#[derive(Debug, Clone)]
pub struct Quadratic {
    q: MatPoint,
    lip: f64,
}

impl Quadratic {
    /// `q` must be square; it is symmetrized so the gradient is `Q x`.
    pub fn new(q: MatPoint) -> Self {
        assert_eq!(q.nrows(), q.ncols(), "quadratic form must be square");
        let sym = (&q + q.transpose()) * 0.5;
        // Frobenius norm dominates the spectral norm.
        let lip = sym.norm().max(f64::MIN_POSITIVE);
        Quadratic { q: sym, lip }
    }

    pub fn matrix(&self) -> &MatPoint {
        &self.q
    }
}

impl SmoothFn for Quadratic {
    fn value(&self, x: &MatPoint) -> f64 {
        0.5 * (x.transpose() * &self.q * x)[(0, 0)]
    }

    fn gradient(&self, x: &MatPoint) -> MatPoint {
        &self.q * x
    }

    fn hess_vec(&self, _x: &MatPoint, d: &MatPoint) -> MatPoint {
        &self.q * d
    }

    fn lipschitz(&self) -> f64 {
        self.lip
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::col_point;

    #[test]
    fn quadratic_gradient_is_qx() {
        let q = MatPoint::from_column_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let f = Quadratic::new(q);
        let x = col_point(&[1.0, -1.0]);
        assert_eq!(f.gradient(&x), col_point(&[2.0, -3.0]));
        assert!((f.value(&x) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_input_is_symmetrized() {
        let q = MatPoint::from_column_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        let f = Quadratic::new(q);
        let x = col_point(&[1.0, 1.0]);
        // Symmetrized Q has 1.0 off-diagonal.
        assert_eq!(f.gradient(&x), col_point(&[1.0, 1.0]));
    }
}
