//! Sparse PCA over the oblique manifold, and its nonnegative variant.
//!
//! The smooth part measures how far the projected covariance is from the
//! leading spectrum of the data:
//!
//! ```text
//! f(X) = || X' G X - D^2 ||_F^2,     G = A' A,
//! ```
//!
//! with `D^2` the squared leading singular values of the processed data
//! matrix. The sparsity penalty plus manifold constraint is
//! `lambda ||X||_1 + indicator(Ob(n, p))`; the nonnegative variant swaps
//! in the `Ob+(n, p)` indicator and drops the L1 term.

use std::sync::Arc;

use crate::config::StepMode;
use crate::nonsmooth::NonsmoothFn;
use crate::point::MatPoint;
use crate::problem::CompositeProblem;
use crate::prox::prox_nonneg_oblique;
use crate::smooth::SmoothFn;

use super::data::{generate_gaussian_data, initial_point_svd, leading_d2, spectral_norm};

/// Processed data backing one sparse-PCA instance.
#[derive(Debug, Clone)]
pub struct SpcaData {
    /// Column-centered, spectral-norm-normalized `m x n` data matrix.
    pub a: MatPoint,
    /// Gram matrix `A' A`, precomputed once.
    pub g: MatPoint,
    /// `p x p` diagonal of squared leading singular values.
    pub d2: MatPoint,
    /// Sparsity weight.
    pub lambda: f64,
}

impl SpcaData {
    /// Generates the seeded instance: Gaussian data, centered and
    /// normalized, with `D^2` taken from the processed matrix.
    pub fn generate(m: usize, n: usize, p: usize, lambda: f64, seed: u64) -> Self {
        let a = generate_gaussian_data(m, n, seed);
        let g = a.transpose() * &a;
        let d2 = leading_d2(&a, p);
        Self { a, g, d2, lambda }
    }
}

/// The smooth objective `||X' G X - D^2||_F^2` with analytic derivatives.
pub struct SpcaSmooth {
    g: MatPoint,
    d2: MatPoint,
    lip: f64,
}

impl SpcaSmooth {
    pub fn new(data: &SpcaData) -> Self {
        // Curvature bound on the manifold (||X||_F = sqrt(p)): with
        // g = ||G||_2, the Hessian norm is at most
        // 4 g (||R||_F + 2 g p) <= 4 g (3 g p + ||D^2||_F).
        let gnorm = spectral_norm(&data.a).powi(2);
        let p = data.d2.nrows() as f64;
        let lip = 4.0 * gnorm * (3.0 * gnorm * p + data.d2.norm());
        Self {
            g: data.g.clone(),
            d2: data.d2.clone(),
            lip,
        }
    }

    fn residual(&self, x: &MatPoint) -> MatPoint {
        x.transpose() * (&self.g * x) - &self.d2
    }
}

impl SmoothFn for SpcaSmooth {
    fn value(&self, x: &MatPoint) -> f64 {
        self.residual(x).norm_squared()
    }

    fn gradient(&self, x: &MatPoint) -> MatPoint {
        let r = self.residual(x);
        (&self.g * x) * r * 4.0
    }

    fn hess_vec(&self, x: &MatPoint, u: &MatPoint) -> MatPoint {
        let gx = &self.g * x;
        let gu = &self.g * u;
        let r = x.transpose() * &gx - &self.d2;
        let cross = u.transpose() * &gx + x.transpose() * &gu;
        (&gu * r + &gx * cross) * 4.0
    }

    fn hess_at<'a>(
        &'a self,
        x: &MatPoint,
    ) -> Box<dyn Fn(&MatPoint) -> MatPoint + Send + Sync + 'a> {
        // The base-point products G x and X' G X - D^2 do not depend on
        // the direction; hoisting them halves the per-application cost.
        let gx = &self.g * x;
        let r = x.transpose() * &gx - &self.d2;
        let x = x.clone();
        Box::new(move |u| {
            let gu = &self.g * u;
            let cross = u.transpose() * &gx + x.transpose() * &gu;
            (&gu * &r + &gx * &cross) * 4.0
        })
    }

    fn lipschitz(&self) -> f64 {
        self.lip
    }
}

fn step_size(mode: StepMode, h: &NonsmoothFn, data: &SpcaData, smooth: &SpcaSmooth) -> f64 {
    match mode {
        // 1 / lambda_max(A'A); spectral normalization makes this ~1.
        StepMode::Experiment => 1.0 / spectral_norm(&data.a).powi(2),
        StepMode::Theory => h.gamma().min(1.0) / smooth.lipschitz(),
    }
}

/// Builds the sparse-PCA composite problem plus its SVD starting point.
pub fn spca_problem(
    m: usize,
    n: usize,
    p: usize,
    lambda: f64,
    seed: u64,
    mode: StepMode,
) -> (CompositeProblem, MatPoint) {
    let data = SpcaData::generate(m, n, p, lambda, seed);
    let x0 = initial_point_svd(&data.a, p).expect("Gaussian data has full numerical rank");
    let smooth = SpcaSmooth::new(&data);
    let h = NonsmoothFn::l1_oblique(lambda, n);
    let t = step_size(mode, &h, &data, &smooth);
    let label = format!("spca-m{m}-n{n}-p{p}");
    (
        CompositeProblem::new(Arc::new(smooth), h, t, &label, (n, p)),
        x0,
    )
}

/// Builds the nonnegative variant: same smooth part, `Ob+` constraint,
/// starting point projected onto the nonnegative slice.
pub fn npca_problem(
    m: usize,
    n: usize,
    p: usize,
    seed: u64,
    mode: StepMode,
) -> (CompositeProblem, MatPoint) {
    let data = SpcaData::generate(m, n, p, 0.0, seed);
    let svd_start = initial_point_svd(&data.a, p).expect("Gaussian data has full numerical rank");
    let x0 = prox_nonneg_oblique(&svd_start).point;
    let smooth = SpcaSmooth::new(&data);
    let h = NonsmoothFn::nonneg_oblique();
    let t = step_size(mode, &h, &data, &smooth);
    let label = format!("npca-m{m}-n{n}-p{p}");
    (
        CompositeProblem::new(Arc::new(smooth), h, t, &label, (n, p)),
        x0,
    )
}
