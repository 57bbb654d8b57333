//! Nonsmooth terms `h` supported by the solvers.
//!
//! Each variant couples a (possibly zero) penalty with a constraint set:
//!
//! ```text
//!   L1Oblique        h(X) = lambda * ||X||_1 + indicator of Ob(n, p)
//!   NonnegOblique    h(X) = indicator of Ob(n, p) intersected with X >= 0
//!   Mcp              h(x) = sum_i mcp(x_i)           (unconstrained)
//!   SphereIndicator  h(x) = indicator of the unit sphere
//! ```
//!
//! where `Ob(n, p)` is the set of `n x p` matrices with unit-norm columns and
//! the minimax concave penalty is
//!
//! ```text
//!   mcp(s) = lambda * |s| - s^2 / (2 theta)   if |s| <= theta * lambda,
//!            theta * lambda^2 / 2             otherwise.
//! ```
//!
//! `gamma` is the radius of the tube around the constraint set on which the
//! proximal map is known to be single-valued and Lipschitz; theory-mode step
//! sizes are capped by it.

use crate::point::MatPoint;

/// Feasibility slack for indicator evaluation.
const DOMAIN_TOL: f64 = 1e-8;

/// Nonsmooth term of a composite objective.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum NonsmoothFn {
    /// `lambda * ||X||_1` plus the indicator of unit-norm columns.
    L1Oblique { lambda: f64, gamma: f64 },
    /// Indicator of unit-norm nonnegative columns.
    NonnegOblique { gamma: f64 },
    /// Elementwise minimax concave penalty, no constraint.
    Mcp { lambda: f64, theta: f64, gamma: f64 },
    /// Indicator of the unit sphere (vectors, `p = 1`).
    SphereIndicator { gamma: f64 },
}

impl NonsmoothFn {
    /// L1 penalty on the oblique manifold. The default tube radius
    /// `1 / ((lambda + 1) n)` shrinks with both the penalty weight and the
    /// column dimension.
    pub fn l1_oblique(lambda: f64, n: usize) -> Self {
        assert!(lambda >= 0.0, "lambda must be nonnegative");
        assert!(n > 0);
        NonsmoothFn::L1Oblique {
            lambda,
            gamma: 1.0 / ((lambda + 1.0) * n as f64),
        }
    }

    /// Nonnegative oblique constraint. Any tube radius below 1 works; 1/2 is
    /// a safe default.
    pub fn nonneg_oblique() -> Self {
        NonsmoothFn::NonnegOblique { gamma: 0.5 }
    }

    /// Minimax concave penalty with weight `lambda` and concavity width
    /// `theta`. Proximal steps require `t < theta`.
    pub fn mcp(lambda: f64, theta: f64) -> Self {
        assert!(lambda >= 0.0, "lambda must be nonnegative");
        assert!(theta > 0.0, "theta must be positive");
        NonsmoothFn::Mcp {
            lambda,
            theta,
            gamma: theta,
        }
    }

    /// Unit-sphere constraint.
    pub fn sphere() -> Self {
        NonsmoothFn::SphereIndicator { gamma: 0.5 }
    }

    /// Overrides the prox-regularity tube radius.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        assert!(gamma > 0.0, "gamma must be positive");
        match &mut self {
            NonsmoothFn::L1Oblique { gamma: g, .. }
            | NonsmoothFn::NonnegOblique { gamma: g }
            | NonsmoothFn::Mcp { gamma: g, .. }
            | NonsmoothFn::SphereIndicator { gamma: g } => *g = gamma,
        }
        self
    }

    /// Tube radius around the constraint set.
    pub fn gamma(&self) -> f64 {
        match self {
            NonsmoothFn::L1Oblique { gamma, .. }
            | NonsmoothFn::NonnegOblique { gamma }
            | NonsmoothFn::Mcp { gamma, .. }
            | NonsmoothFn::SphereIndicator { gamma } => *gamma,
        }
    }

    /// Penalty value at `x`. Indicator parts evaluate to `+inf` when `x` is
    /// farther than a small slack from the constraint set, so objective
    /// comparisons stay honest even if a caller passes an infeasible point.
    pub fn value(&self, x: &MatPoint) -> f64 {
        match self {
            NonsmoothFn::L1Oblique { lambda, .. } => {
                if !on_oblique(x) {
                    return f64::INFINITY;
                }
                lambda * x.iter().map(|v| v.abs()).sum::<f64>()
            }
            NonsmoothFn::NonnegOblique { .. } => {
                let nonneg = x.iter().all(|&v| v >= -DOMAIN_TOL);
                if on_oblique(x) && nonneg {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            NonsmoothFn::Mcp { lambda, theta, .. } => x
                .iter()
                .map(|&s| {
                    let a = s.abs();
                    if a <= theta * lambda {
                        lambda * a - s * s / (2.0 * theta)
                    } else {
                        theta * lambda * lambda / 2.0
                    }
                })
                .sum(),
            NonsmoothFn::SphereIndicator { .. } => {
                if (x.norm() - 1.0).abs() <= DOMAIN_TOL {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Whether the domain of `h` is a strict subset of the ambient space.
    pub fn is_constrained(&self) -> bool {
        !matches!(self, NonsmoothFn::Mcp { .. })
    }
}

fn on_oblique(x: &MatPoint) -> bool {
    x.column_iter().all(|c| (c.norm() - 1.0).abs() <= DOMAIN_TOL)
}
