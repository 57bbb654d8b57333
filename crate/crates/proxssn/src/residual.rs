//! The natural residual `F` and the action of its generalized Jacobian.
//!
//! For a composite problem `min f(x) + h(x)` with step `t`, the natural
//! residual is
//!
//! ```text
//! F(x) = x - prox_{t h}(x - t * grad f(x)),
//! ```
//!
//! whose zeros are exactly the stationary points. The Newton method solves
//! regularized systems with one element `M` of the generalized Jacobian,
//!
//! ```text
//! M = I - D (I - t * hess f(x)),
//! ```
//!
//! where `D` is the proximal-map derivative at the inner point
//! `u = x - t * grad f(x)`. Everything here is matrix-free: `M` is only
//! ever applied to directions, and a dense materialization exists solely
//! for small cross-checks.

use thiserror::Error;

use crate::point::MatPoint;
use crate::problem::CompositeProblem;
use crate::prox::{prox, ProxJacobian, ProxResult};

/// Largest `n * p` for which a dense Jacobian may be materialized.
pub const DENSE_CAP: usize = 2000;

#[derive(Debug, Error)]
pub enum ResidualError {
    /// Dense materialization requested above the size cap.
    #[error("dense Jacobian requested for n*p = {np}, cap is {cap}")]
    DimensionTooLarge { np: usize, cap: usize },
}

/// A full evaluation of the natural residual at one point.
#[derive(Debug, Clone)]
pub struct ResidualEval {
    /// `F(x) = x - prox_{t h}(x - t * grad f(x))`.
    pub f: MatPoint,
    /// Frobenius norm of `f`.
    pub norm_f: f64,
    /// The inner point `u = x - t * grad f(x)` the prox was taken at.
    pub inner_point: MatPoint,
    /// Branch bookkeeping from the prox evaluation at `inner_point`.
    pub prox_info: ProxResult,
    /// `grad f(x)`, kept so callers do not recompute it.
    pub grad: MatPoint,
}

/// Evaluates the natural residual at `x`.
pub fn natural_residual(prob: &CompositeProblem, x: &MatPoint) -> ResidualEval {
    residual_with_step(prob, x, prob.t)
}

/// Evaluates the residual of the natural map with an explicit step `t`,
/// used by the line-search solver whose step changes every iteration.
pub fn residual_with_step(prob: &CompositeProblem, x: &MatPoint, t: f64) -> ResidualEval {
    assert!(t > 0.0, "natural residual needs a positive step");
    let grad = prob.f.gradient(x);
    let inner_point = x - &grad * t;
    let prox_info = prox(&prob.h, &inner_point, t)
        .expect("problem construction must guarantee a valid prox step");
    let f = x - &prox_info.point;
    let norm_f = f.norm();
    ResidualEval {
        f,
        norm_f,
        inner_point,
        prox_info,
        grad,
    }
}

/// The scaled first-order stationarity measure used as a stopping rule:
/// `||x - prox_{t h}(x - t grad f(x))||_F / (t (1 + ||x||_F))`.
pub fn kkt_error(prob: &CompositeProblem, x: &MatPoint, t: f64) -> f64 {
    let eval = residual_with_step(prob, x, t);
    eval.norm_f / (t * (1.0 + x.norm()))
}

/// One selected element of the generalized Jacobian of `F` at a point,
/// packaged as a linear operator `d -> (M + mu I) d`.
pub struct JacobianOperator<'a> {
    prob: &'a CompositeProblem,
    hess: Box<dyn Fn(&MatPoint) -> MatPoint + Send + Sync + 'a>,
    plan: ProxJacobian,
    /// Tikhonov shift added to `M`; zero gives the bare Jacobian element.
    pub mu: f64,
}

impl<'a> JacobianOperator<'a> {
    /// Builds the operator at `x`, selecting the prox derivative at the
    /// inner point recorded in `eval`. Threshold-boundary entries are
    /// resolved by the prox module's selection rule rather than rejected.
    pub fn new(prob: &'a CompositeProblem, x: &MatPoint, eval: &ResidualEval, mu: f64) -> Self {
        let plan = ProxJacobian::for_kind(&prob.h, &eval.inner_point, prob.t);
        Self {
            prob,
            hess: prob.f.hess_at(x),
            plan,
            mu,
        }
    }

    /// Applies `(M + mu I) d = d - D[d - t * hess f(x) d] + mu d`.
    pub fn apply(&self, d: &MatPoint) -> MatPoint {
        let hv = (self.hess)(d);
        let inner = d - hv * self.prob.t;
        let dd = self.plan.apply(&inner);
        d - dd + d * self.mu
    }

    /// Count of base-point entries that sat exactly on a nonsmooth
    /// threshold and were resolved as inactive.
    pub fn resolved_boundaries(&self) -> usize {
        self.plan.resolved_boundaries()
    }
}

/// Applies the bare Jacobian element `M` (no regularization) at `x` to `d`.
pub fn residual_jacobian_apply(prob: &CompositeProblem, x: &MatPoint, d: &MatPoint) -> MatPoint {
    let eval = natural_residual(prob, x);
    JacobianOperator::new(prob, x, &eval, 0.0).apply(d)
}

/// Materializes `M` at `x` against the standard basis. Testing and small
/// direct solves only; refuses dimensions above [`DENSE_CAP`].
pub fn residual_jacobian_dense(
    prob: &CompositeProblem,
    x: &MatPoint,
) -> Result<MatPoint, ResidualError> {
    let (n, p) = (x.nrows(), x.ncols());
    let np = n * p;
    if np > DENSE_CAP {
        return Err(ResidualError::DimensionTooLarge {
            np,
            cap: DENSE_CAP,
        });
    }
    let eval = natural_residual(prob, x);
    let op = JacobianOperator::new(prob, x, &eval, 0.0);
    let mut dense = MatPoint::zeros(np, np);
    let mut basis = MatPoint::zeros(n, p);
    for j in 0..np {
        basis[(j % n, j / n)] = 1.0;
        let col = op.apply(&basis);
        for i in 0..np {
            dense[(i, j)] = col[(i % n, i / n)];
        }
        basis[(j % n, j / n)] = 0.0;
    }
    Ok(dense)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SolverConfig;
    use crate::nonsmooth::NonsmoothFn;
    use crate::oracle::finite_difference_apply;
    use crate::point::{col_point, MatPoint};
    use crate::problems::rng::Rng;
    use crate::smooth::Quadratic;
    use std::sync::Arc;

    fn sphere_quadratic(diag: &[f64], t: f64) -> CompositeProblem {
        let n = diag.len();
        let mut q = MatPoint::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            q[(i, i)] = d;
        }
        CompositeProblem::new(
            Arc::new(Quadratic::new(q)),
            NonsmoothFn::sphere(),
            t,
            "sphere-quadratic",
            (n, 1),
        )
    }

    fn l1_quadratic(diag: &[f64], lambda: f64, t: f64) -> CompositeProblem {
        let n = diag.len();
        let mut q = MatPoint::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            q[(i, i)] = d;
        }
        CompositeProblem::new(
            Arc::new(Quadratic::new(q)),
            NonsmoothFn::l1_oblique(lambda, n),
            t,
            "l1-quadratic",
            (n, 1),
        )
    }

    #[test]
    fn eigenvectors_are_fixed_points() {
        let prob = sphere_quadratic(&[1.0, 2.0, 3.0], 0.1);
        for i in 0..3 {
            let mut x = MatPoint::zeros(3, 1);
            x[(i, 0)] = 1.0;
            let eval = natural_residual(&prob, &x);
            assert!(eval.norm_f < 1e-15, "eigenvector {i} not fixed");
            assert!(kkt_error(&prob, &x, prob.t) < 1e-14);
        }
    }

    #[test]
    fn zero_gradient_domain_point_is_fixed() {
        let prob = sphere_quadratic(&[0.0, 0.0], 0.2);
        let x = col_point(&[0.6, 0.8]);
        let eval = natural_residual(&prob, &x);
        assert!(eval.norm_f < 1e-15);
    }

    #[test]
    fn residual_matches_manual_composition() {
        let prob = l1_quadratic(&[1.0, -0.5, 0.3], 0.4, 0.15);
        let x = col_point(&[0.7, -0.5, 0.51]);
        let eval = natural_residual(&prob, &x);
        let grad = prob.f.gradient(&x);
        let u = &x - &grad * prob.t;
        let px = crate::prox::prox(&prob.h, &u, prob.t).unwrap().point;
        assert!((&eval.f - (&x - &px)).norm() < 1e-15);
        assert!((eval.norm_f - eval.f.norm()).abs() <= 1e-15 * eval.norm_f.max(1.0));
        assert!((eval.inner_point - u).norm() < 1e-15);
    }

    #[test]
    fn jacobian_apply_is_linear_and_zero_at_zero() {
        let prob = l1_quadratic(&[1.0, 2.0, 0.5], 0.3, 0.1);
        let x = col_point(&[0.9, 0.4, -0.2]);
        let zero = MatPoint::zeros(3, 1);
        assert_eq!(residual_jacobian_apply(&prob, &x, &zero), zero);

        let mut rng = Rng::new(9);
        let eval = natural_residual(&prob, &x);
        let op = JacobianOperator::new(&prob, &x, &eval, 0.0);
        for _ in 0..50 {
            let mut d1 = MatPoint::zeros(3, 1);
            let mut d2 = MatPoint::zeros(3, 1);
            for i in 0..3 {
                d1[(i, 0)] = rng.normal();
                d2[(i, 0)] = rng.normal();
            }
            let alpha = rng.range(-2.0, 2.0);
            let lhs = op.apply(&(&d1 * alpha + &d2));
            let rhs = op.apply(&d1) * alpha + op.apply(&d2);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences_of_the_residual() {
        let prob = l1_quadratic(&[1.0, -0.4, 0.7, 0.2], 0.35, 0.12);
        let mut rng = Rng::new(17);
        let mut checked = 0;
        while checked < 20 {
            let mut x = MatPoint::zeros(4, 1);
            let mut d = MatPoint::zeros(4, 1);
            for i in 0..4 {
                x[(i, 0)] = rng.normal();
                d[(i, 0)] = rng.normal();
            }
            // Keep clear of prox thresholds so the map is differentiable
            // at both FD sample points.
            let grad = prob.f.gradient(&x);
            let u = &x - &grad * prob.t;
            let w_min = u
                .iter()
                .map(|&v| (v.abs() - prob.t * 0.35).abs())
                .fold(f64::INFINITY, f64::min);
            if w_min < 1e-4 {
                continue;
            }
            let got = residual_jacobian_apply(&prob, &x, &d);
            let fd = finite_difference_apply(
                |y| natural_residual(&prob, y).f,
                &x,
                &d,
                1e-6,
            );
            let rel = (&got - &fd).norm() / got.norm().max(1e-12);
            assert!(rel <= 1e-5, "relative FD error {rel}");
            checked += 1;
        }
    }

    #[test]
    fn identity_branch_reduces_to_scaled_hessian() {
        // MCP with all coordinates past the second kink: prox is the
        // identity there, so M d = d - (d - t Q d) = t Q d exactly.
        let n = 3;
        let mut q = MatPoint::zeros(n, n);
        q[(0, 0)] = 1.0;
        q[(1, 1)] = -0.5;
        q[(2, 2)] = 0.25;
        let prob = CompositeProblem::new(
            Arc::new(Quadratic::new(q.clone())),
            NonsmoothFn::mcp(0.01, 4.0),
            0.5,
            "mcp-quadratic",
            (n, 1),
        );
        let x = col_point(&[30.0, 25.0, -40.0]);
        let d = col_point(&[1.0, -2.0, 0.5]);
        let got = residual_jacobian_apply(&prob, &x, &d);
        let want = q * &d * prob.t;
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn dense_matches_operator_and_respects_cap() {
        let prob = l1_quadratic(&[1.0, 0.2, -0.3], 0.3, 0.1);
        let x = col_point(&[0.8, -0.45, 0.4]);
        let dense = residual_jacobian_dense(&prob, &x).unwrap();

        let mut e1 = MatPoint::zeros(3, 1);
        e1[(0, 0)] = 1.0;
        let col1 = residual_jacobian_apply(&prob, &x, &e1);
        for i in 0..3 {
            assert!((dense[(i, 0)] - col1[(i, 0)]).abs() < 1e-15);
        }

        let mut rng = Rng::new(3);
        for _ in 0..20 {
            let mut d = MatPoint::zeros(3, 1);
            for i in 0..3 {
                d[(i, 0)] = rng.normal();
            }
            let via_dense = &dense * &d;
            let via_op = residual_jacobian_apply(&prob, &x, &d);
            assert!((via_dense - via_op).norm() < 1e-12);
        }

        let big = CompositeProblem::new(
            Arc::new(Quadratic::new(MatPoint::identity(2001, 2001))),
            NonsmoothFn::sphere(),
            0.1,
            "too-big",
            (2001, 1),
        );
        let xb = MatPoint::identity(2001, 1);
        assert!(matches!(
            residual_jacobian_dense(&big, &xb),
            Err(ResidualError::DimensionTooLarge { np: 2001, .. })
        ));
    }

    #[test]
    fn regularization_shifts_the_operator_exactly() {
        let prob = l1_quadratic(&[1.0, 0.5], 0.3, 0.1);
        let x = col_point(&[0.9, -0.44]);
        let eval = natural_residual(&prob, &x);
        let bare = JacobianOperator::new(&prob, &x, &eval, 0.0);
        let shifted = JacobianOperator::new(&prob, &x, &eval, 0.7);
        let d = col_point(&[0.3, -1.2]);
        let diff = shifted.apply(&d) - bare.apply(&d);
        assert!((diff - &d * 0.7).norm() < 1e-15);
    }

    #[test]
    fn linearization_error_vanishes_superlinearly_near_points() {
        // Semismoothness proxy: || F(x+d) - F(x) - M(x+d) d || / ||d||
        // shrinks as ||d|| does, sampling many base points.
        let prob = l1_quadratic(&[1.0, -0.4, 0.7], 0.35, 0.12);
        let mut rng = Rng::new(41);
        let mut tested = 0;
        while tested < 100 {
            let mut x = MatPoint::zeros(3, 1);
            let mut dir = MatPoint::zeros(3, 1);
            for i in 0..3 {
                x[(i, 0)] = rng.normal();
                dir[(i, 0)] = rng.normal();
            }
            dir /= dir.norm();
            // Skip bases near a threshold: shrinking steps would cross it.
            let grad = prob.f.gradient(&x);
            let u = &x - &grad * prob.t;
            let w_min = u
                .iter()
                .map(|&v| (v.abs() - prob.t * 0.35).abs())
                .fold(f64::INFINITY, f64::min);
            if w_min < 1e-2 || u.norm() < 1e-2 {
                continue;
            }
            let f0 = natural_residual(&prob, &x).f;
            let mut ratios = Vec::new();
            for eps in [1e-2, 1e-4, 1e-6] {
                let xp = &x + &dir * eps;
                let evalp = natural_residual(&prob, &xp);
                let op = JacobianOperator::new(&prob, &xp, &evalp, 0.0);
                let lin_err = (&evalp.f - &f0 - op.apply(&(&dir * eps))).norm();
                ratios.push(lin_err / eps);
            }
            assert!(
                ratios[0] > ratios[1] && ratios[1] > ratios[2] || ratios[2] < 1e-12,
                "linearization ratios not decreasing: {ratios:?}"
            );
            tested += 1;
        }
    }

    #[test]
    fn residual_is_lipschitz_on_sampled_regions() {
        let prob = l1_quadratic(&[1.0, 0.6, -0.2], 0.3, 0.1);
        let mut rng = Rng::new(88);
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let mut x = MatPoint::zeros(3, 1);
            let mut y = MatPoint::zeros(3, 1);
            for i in 0..3 {
                x[(i, 0)] = rng.normal();
                y[(i, 0)] = rng.normal();
            }
            let gap = (&x - &y).norm();
            if gap < 1e-8 {
                continue;
            }
            let fx = natural_residual(&prob, &x).f;
            let fy = natural_residual(&prob, &y).f;
            worst = worst.max((fx - fy).norm() / gap);
        }
        println!("observed residual Lipschitz ratio: {worst:.3}");
        assert!(worst.is_finite() && worst < 50.0);
    }

    #[test]
    fn config_tolerance_is_positive() {
        // Anchor: the default stopping tolerance feeds kkt_error
        // comparisons, so it must be strictly positive.
        assert!(SolverConfig::experiment().tol > 0.0);
    }
}
