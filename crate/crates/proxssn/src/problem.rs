//! Composite problem bundle.

use crate::nonsmooth::NonsmoothFn;
use crate::point::MatPoint;
use crate::smooth::SmoothFn;
use std::sync::Arc;

/// `min f(x) + h(x)` together with the prox step size `t` the solvers use.
///
/// Problems built in theory mode satisfy `t <= min(h.gamma, 1) / L`;
/// experiment mode sets `t` from the data spectrum instead (see
/// [`crate::problems`]). The smooth part sits behind an `Arc` so instances
/// can be fanned out across benchmark workers.
#[derive(Clone)]
pub struct CompositeProblem {
    pub f: Arc<dyn SmoothFn>,
    pub h: NonsmoothFn,
    pub t: f64,
    pub label: String,
    pub dims: (usize, usize),
}

impl CompositeProblem {
    pub fn new(
        f: Arc<dyn SmoothFn>,
        h: NonsmoothFn,
        t: f64,
        label: impl Into<String>,
        dims: (usize, usize),
    ) -> Self {
        assert!(t > 0.0, "prox step size must be positive");
        CompositeProblem {
            f,
            h,
            t,
            label: label.into(),
            dims,
        }
    }

    /// Theory-mode constructor; clamps nothing, checks the step bound.
    pub fn theory_mode(
        f: Arc<dyn SmoothFn>,
        h: NonsmoothFn,
        label: impl Into<String>,
        dims: (usize, usize),
    ) -> Self {
        let t = h.gamma().min(1.0) / f.lipschitz();
        CompositeProblem::new(f, h, t, label, dims)
    }

    /// Full objective `f(x) + h(x)`.
    pub fn objective(&self, x: &MatPoint) -> f64 {
        self.f.value(x) + self.h.value(x)
    }
}

impl std::fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("label", &self.label)
            .field("dims", &self.dims)
            .field("t", &self.t)
            .field("h", &self.h)
            .finish()
    }
}
