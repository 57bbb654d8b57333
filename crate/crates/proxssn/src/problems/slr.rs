//! Sparse least-squares regression over the probability simplex.
//!
//! Writing the simplex variable as `y = x .* x` with `x` on the unit
//! sphere turns simplex-constrained least squares into an oblique-manifold
//! composite:
//!
//! ```text
//! f(x) = 1/2 || A (x .* x) - b ||^2,    h = lambda ||x||_1 + indicator(Ob(n, 1)).
//! ```
//!
//! Instances are synthesized from a seeded sparse ground truth `x*` on the
//! manifold with `b = A (x* .* x*)`, so a zero-residual solution exists by
//! construction.

use std::sync::Arc;

use crate::config::StepMode;
use crate::nonsmooth::NonsmoothFn;
use crate::point::MatPoint;
use crate::problem::CompositeProblem;
use crate::smooth::SmoothFn;

use super::data::{generate_gaussian_data, initial_point_svd, spectral_norm};
use super::rng::Rng;

/// Data backing one regression instance.
#[derive(Debug, Clone)]
pub struct SlrData {
    /// Processed `m x n` design matrix.
    pub a: MatPoint,
    /// Right-hand side `A (x* .* x*)` for the seeded sparse `x*`.
    pub b: MatPoint,
    /// Sparsity weight.
    pub lambda: f64,
    /// The planted solution `x*`, unit-norm and nonnegative.
    pub ground_truth: MatPoint,
}

impl SlrData {
    /// Generates the seeded instance. The ground truth puts equal mass on
    /// `ceil(n / 20)` (at least 2) random coordinates of the simplex.
    pub fn generate(m: usize, n: usize, lambda: f64, seed: u64) -> Self {
        let a = generate_gaussian_data(m, n, seed);
        let mut rng = Rng::new(seed);
        let mut truth_rng = rng.fork(0x5172);
        let support = n.div_ceil(20).max(2).min(n);
        let mut xstar = vec![0.0f64; n];
        let mut placed = 0;
        while placed < support {
            let i = truth_rng.index(n);
            if xstar[i] == 0.0 {
                xstar[i] = 1.0 / (support as f64).sqrt();
                placed += 1;
            }
        }
        let mut ground_truth = MatPoint::zeros(n, 1);
        for (i, v) in xstar.iter().enumerate() {
            ground_truth[(i, 0)] = *v;
        }
        let b = &a * ground_truth.component_mul(&ground_truth);
        Self {
            a,
            b,
            lambda,
            ground_truth,
        }
    }
}

/// The smooth objective `1/2 ||A (x .* x) - b||^2` with analytic
/// derivatives; products with `A'A` are formed through `A` directly.
pub struct SlrSmooth {
    a: MatPoint,
    b: MatPoint,
    lip: f64,
}

impl SlrSmooth {
    pub fn new(data: &SlrData) -> Self {
        // Region bound on the manifold (||x|| = 1, so ||x .* x|| <= 1):
        // the Hessian norm is at most 6 g + 2 sqrt(g) ||b|| with
        // g = ||A||_2^2.
        let g = spectral_norm(&data.a).powi(2);
        let lip = 6.0 * g + 2.0 * g.sqrt() * data.b.norm();
        Self {
            a: data.a.clone(),
            b: data.b.clone(),
            lip,
        }
    }

    fn residual(&self, x: &MatPoint) -> MatPoint {
        &self.a * x.component_mul(x) - &self.b
    }
}

impl SmoothFn for SlrSmooth {
    fn value(&self, x: &MatPoint) -> f64 {
        0.5 * self.residual(x).norm_squared()
    }

    fn gradient(&self, x: &MatPoint) -> MatPoint {
        let r = self.residual(x);
        let at_r = self.a.transpose() * r;
        (x.component_mul(&at_r)) * 2.0
    }

    fn hess_vec(&self, x: &MatPoint, u: &MatPoint) -> MatPoint {
        let r = self.residual(x);
        let at_r = self.a.transpose() * r;
        let xu = x.component_mul(u);
        let at_a_xu = self.a.transpose() * (&self.a * &xu);
        u.component_mul(&at_r) * 2.0 + x.component_mul(&at_a_xu) * 4.0
    }

    fn hess_at<'a>(
        &'a self,
        x: &MatPoint,
    ) -> Box<dyn Fn(&MatPoint) -> MatPoint + Send + Sync + 'a> {
        // The weighted residual A'(A(x.*x) - b) is direction-independent.
        let r = self.residual(x);
        let at_r = self.a.transpose() * r;
        let x = x.clone();
        Box::new(move |u| {
            let xu = x.component_mul(u);
            let at_a_xu = self.a.transpose() * (&self.a * &xu);
            u.component_mul(&at_r) * 2.0 + x.component_mul(&at_a_xu) * 4.0
        })
    }

    fn lipschitz(&self) -> f64 {
        self.lip
    }
}

/// Builds the regression composite problem plus its SVD starting point.
pub fn slr_problem(
    m: usize,
    n: usize,
    lambda: f64,
    seed: u64,
    mode: StepMode,
) -> (CompositeProblem, MatPoint) {
    let data = SlrData::generate(m, n, lambda, seed);
    let x0 = initial_point_svd(&data.a, 1).expect("Gaussian data has full numerical rank");
    let smooth = SlrSmooth::new(&data);
    let h = NonsmoothFn::l1_oblique(lambda, n);
    let t = match mode {
        StepMode::Experiment => 1.0 / spectral_norm(&data.a).powi(2),
        StepMode::Theory => h.gamma().min(1.0) / smooth.lipschitz(),
    };
    let label = format!("slr-m{m}-n{n}");
    (
        CompositeProblem::new(Arc::new(smooth), h, t, &label, (n, 1)),
        x0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{finite_difference_apply, finite_difference_gradient};

    fn random_point(n: usize, rng: &mut Rng) -> MatPoint {
        let mut x = MatPoint::zeros(n, 1);
        for i in 0..n {
            x[(i, 0)] = rng.normal();
        }
        x
    }

    #[test]
    fn ground_truth_attains_zero_residual() {
        let data = SlrData::generate(6, 10, 0.01, 3);
        let smooth = SlrSmooth::new(&data);
        let xstar = data.ground_truth.clone();
        assert!((xstar.norm() - 1.0).abs() <= 1e-12, "x* lives on the sphere");
        assert!(xstar.iter().all(|&v| v >= 0.0));
        assert_eq!(smooth.value(&xstar), 0.0);
        assert_eq!(smooth.gradient(&xstar).norm(), 0.0);

        let regen = SlrData::generate(6, 10, 0.01, 3);
        assert_eq!(data.b, regen.b, "b must be reproducible");
    }

    #[test]
    fn zero_residual_point_has_zero_gradient() {
        // Make b = A(x .* x) for a known x, then check f(x) = 0 and
        // grad f(x) = 0.
        let a = generate_gaussian_data(6, 10, 4);
        let mut x = MatPoint::zeros(10, 1);
        for (i, v) in [0.6, 0.8].iter().enumerate() {
            x[(i, 0)] = *v;
        }
        let b = &a * x.component_mul(&x);
        let data = SlrData {
            a,
            b,
            lambda: 0.01,
            ground_truth: x.clone(),
        };
        let smooth = SlrSmooth::new(&data);
        assert!(smooth.value(&x) <= 1e-30);
        assert!(smooth.gradient(&x).norm() <= 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = SlrData::generate(6, 10, 0.01, 3);
        let smooth = SlrSmooth::new(&data);
        let mut rng = Rng::new(500);
        for _ in 0..20 {
            let x = random_point(10, &mut rng);
            let grad = smooth.gradient(&x);
            let fd = finite_difference_gradient(|y| smooth.value(y), &x, 1e-6);
            let rel = (&grad - &fd).norm() / grad.norm().max(1e-12);
            assert!(rel <= 1e-5, "gradient FD error {rel}");
        }
    }

    #[test]
    fn hessian_action_matches_finite_differences() {
        let data = SlrData::generate(6, 10, 0.01, 3);
        let smooth = SlrSmooth::new(&data);
        let mut rng = Rng::new(600);
        for _ in 0..20 {
            let x = random_point(10, &mut rng);
            let u = random_point(10, &mut rng);
            let hv = smooth.hess_vec(&x, &u);
            let fd = finite_difference_apply(|y| smooth.gradient(y), &x, &u, 1e-6);
            let rel = (&hv - &fd).norm() / hv.norm().max(1e-12);
            assert!(rel <= 1e-5, "hess_vec FD error {rel}");
        }
    }

    #[test]
    fn builder_produces_a_feasible_deterministic_start() {
        let (prob, x0) = slr_problem(20, 60, 0.01, 7, StepMode::Experiment);
        assert!((x0.norm() - 1.0).abs() <= 1e-12);
        assert!((prob.t - 1.0).abs() < 1e-9);
        let (prob2, x02) = slr_problem(20, 60, 0.01, 7, StepMode::Experiment);
        assert_eq!(x0, x02);
        assert_eq!(prob.t.to_bits(), prob2.t.to_bits());
    }
}
