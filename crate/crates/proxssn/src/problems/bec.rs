//! A ground-state energy model with a unit-sphere constraint.
//!
//! The complex quartic energy
//!
//! ```text
//! f(x) = 1/2 x* A x + (beta/2) sum_i |x_i|^4,     ||x||_2 = 1,  x in C^M,
//! ```
//!
//! is handled entirely in real coordinates: `x = (u; v)` stacks real and
//! imaginary parts, and the Hermitian operator `A = H_r + i H_i` becomes
//! the symmetric `2M x 2M` block matrix `[[H_r, -H_i], [H_i, H_r]]`. The
//! operator is synthesized from seeded complex Gaussian data as
//! `B + B^H + c I` with `c` shifting the smallest eigenvalue to zero, a
//! stand-in for a discretized kinetic-plus-potential operator.

use std::sync::Arc;

use crate::config::StepMode;
use crate::nonsmooth::NonsmoothFn;
use crate::point::MatPoint;
use crate::problem::CompositeProblem;
use crate::smooth::SmoothFn;

use super::rng::Rng;

/// Synthesized operator data for one instance.
#[derive(Debug, Clone)]
pub struct BecData {
    /// Real `2M x 2M` representation of the Hermitian operator; symmetric
    /// positive semidefinite by construction.
    pub a_real: MatPoint,
    /// Interaction strength in front of the quartic term.
    pub beta: f64,
    /// Complex dimension `M`.
    pub m_complex: usize,
}

/// Builds the seeded Hermitian operator `B + B^H + c I` (entries of `B`
/// are complex Gaussian scaled by `1/sqrt(M)`), shifted so its smallest
/// eigenvalue is zero, and returns the real representation.
pub fn generate_bec_data(m_complex: usize, beta: f64, seed: u64) -> BecData {
    assert!(m_complex >= 2, "need at least two complex dimensions");
    let m = m_complex;
    let scale = 1.0 / (m as f64).sqrt();
    let mut rng = Rng::new(seed);
    // B = Br + i Bi; B + B^H has real part Br + Br' (symmetric) and
    // imaginary part Bi - Bi' (antisymmetric).
    let mut hr = MatPoint::zeros(m, m);
    let mut hi = MatPoint::zeros(m, m);
    for j in 0..m {
        for i in 0..m {
            let br = rng.normal() * scale;
            let bi = rng.normal() * scale;
            hr[(i, j)] += br;
            hr[(j, i)] += br;
            hi[(i, j)] += bi;
            hi[(j, i)] -= bi;
        }
    }
    let mut a_real = MatPoint::zeros(2 * m, 2 * m);
    for j in 0..m {
        for i in 0..m {
            a_real[(i, j)] = hr[(i, j)];
            a_real[(m + i, m + j)] = hr[(i, j)];
            a_real[(m + i, j)] = hi[(i, j)];
            a_real[(i, m + j)] = -hi[(i, j)];
        }
    }
    let eigen = a_real.clone().symmetric_eigen();
    let lambda_min = eigen.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if lambda_min < 0.0 {
        for i in 0..2 * m {
            a_real[(i, i)] -= lambda_min;
        }
    }
    BecData {
        a_real,
        beta,
        m_complex: m,
    }
}

/// The real-coordinate energy with analytic derivatives.
pub struct BecSmooth {
    a_real: MatPoint,
    beta: f64,
    m: usize,
    lip: f64,
}

impl BecSmooth {
    pub fn new(data: &BecData) -> Self {
        // On the unit sphere every |x_i|^2 <= 1, so the quartic block adds
        // at most 6 beta to the largest operator eigenvalue.
        let eigen = data.a_real.clone().symmetric_eigen();
        let lambda_max = eigen
            .eigenvalues
            .iter()
            .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        Self {
            a_real: data.a_real.clone(),
            beta: data.beta,
            m: data.m_complex,
            lip: lambda_max + 6.0 * data.beta,
        }
    }

    /// Squared complex moduli `u_i^2 + v_i^2`, length `M`.
    fn moduli2(&self, x: &MatPoint) -> Vec<f64> {
        (0..self.m)
            .map(|i| x[(i, 0)] * x[(i, 0)] + x[(self.m + i, 0)] * x[(self.m + i, 0)])
            .collect()
    }
}

impl SmoothFn for BecSmooth {
    fn value(&self, x: &MatPoint) -> f64 {
        let quad = 0.5 * (x.transpose() * (&self.a_real * x))[(0, 0)];
        let quartic: f64 = self.moduli2(x).iter().map(|r2| r2 * r2).sum();
        quad + 0.5 * self.beta * quartic
    }

    fn gradient(&self, x: &MatPoint) -> MatPoint {
        let mut grad = &self.a_real * x;
        let r2 = self.moduli2(x);
        for i in 0..self.m {
            grad[(i, 0)] += 2.0 * self.beta * r2[i] * x[(i, 0)];
            grad[(self.m + i, 0)] += 2.0 * self.beta * r2[i] * x[(self.m + i, 0)];
        }
        grad
    }

    fn hess_vec(&self, x: &MatPoint, w: &MatPoint) -> MatPoint {
        let mut out = &self.a_real * w;
        let r2 = self.moduli2(x);
        for i in 0..self.m {
            let (u, v) = (x[(i, 0)], x[(self.m + i, 0)]);
            let (p, q) = (w[(i, 0)], w[(self.m + i, 0)]);
            let mixed = u * p + v * q;
            out[(i, 0)] += 2.0 * self.beta * (r2[i] * p + 2.0 * u * mixed);
            out[(self.m + i, 0)] += 2.0 * self.beta * (r2[i] * q + 2.0 * v * mixed);
        }
        out
    }

    fn lipschitz(&self) -> f64 {
        self.lip
    }
}

/// Builds the sphere-constrained energy problem plus a seeded unit-norm
/// starting point.
pub fn bec_problem(
    m_complex: usize,
    beta: f64,
    seed: u64,
    mode: StepMode,
) -> (CompositeProblem, MatPoint) {
    let data = generate_bec_data(m_complex, beta, seed);
    let smooth = BecSmooth::new(&data);
    let h = NonsmoothFn::sphere();
    let eigen = data.a_real.clone().symmetric_eigen();
    let lambda_max = eigen
        .eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let t = match mode {
        // The quadratic part plays the role of A'A, whose largest
        // eigenvalue is lambda_max^2 for a symmetric operator.
        StepMode::Experiment => 1.0 / (lambda_max * lambda_max),
        StepMode::Theory => h.gamma().min(1.0) / smooth.lipschitz(),
    };
    let mut rng = Rng::new(seed);
    let mut init_rng = rng.fork(0xB0);
    let mut x0 = MatPoint::zeros(2 * m_complex, 1);
    for i in 0..2 * m_complex {
        x0[(i, 0)] = init_rng.normal();
    }
    x0 /= x0.norm();
    let label = format!("bec-M{m_complex}");
    (
        CompositeProblem::new(Arc::new(smooth), h, t, &label, (2 * m_complex, 1)),
        x0,
    )
}
