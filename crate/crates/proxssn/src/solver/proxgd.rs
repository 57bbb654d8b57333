//! Proximal gradient descent with Barzilai-Borwein steps and a
//! nonmonotone line search.
//!
//! The trial step alternates between the two BB formulas
//!
//! ```text
//! beta1 = <s, s> / |<s, y>|       beta2 = |<s, y>| / <y, y>
//! ```
//!
//! (`s` the iterate difference, `y` the gradient difference), backtracked
//! by `delta` until the averaged reference value admits the trial:
//!
//! ```text
//! phi(trial) <= C_k + (varrho / (2 t)) ||trial - x||^2,
//! C_k = (varpi Q_{k-1} C_{k-1} + phi(x^k)) / Q_k,   Q_k = varpi Q_{k-1} + 1.
//! ```

use std::time::Instant;

use thiserror::Error;

use crate::config::SolverConfig;
use crate::nonsmooth::NonsmoothFn;
use crate::point::MatPoint;
use crate::problem::CompositeProblem;
use crate::prox::{project_domain, prox};
use crate::report::{SolverReport, Status, StepKind, TraceRecord};
use crate::residual::residual_with_step;

/// Backtracking cap; past it the last trial is taken with a warning.
pub const MAX_BACKTRACKS: usize = 50;

/// Step-size bounds the BB formulas are clamped into.
pub const BB_CLAMP: (f64, f64) = (1e-10, 1e10);

#[derive(Debug, Error)]
pub enum StepSizeError {
    /// `|<s, y>|` vanished relative to `||s|| ||y||`; the caller should
    /// reuse its previous accepted step.
    #[error("BB curvature degenerate: |<s,y>| = {inner:.3e}")]
    DegenerateCurvature { inner: f64 },
}

/// One Barzilai-Borwein step size from the difference pair, alternating
/// between the two formulas: `odd_parity = false` selects
/// `<s,s>/|<s,y>|`, `true` selects `|<s,y>|/<y,y>`.
pub fn bb_stepsize(s: &MatPoint, y: &MatPoint, odd_parity: bool) -> Result<f64, StepSizeError> {
    let sy = s.dot(y).abs();
    if sy <= 1e-16 * s.norm() * y.norm() {
        return Err(StepSizeError::DegenerateCurvature { inner: sy });
    }
    let beta = if odd_parity {
        sy / y.dot(y)
    } else {
        s.dot(s) / sy
    };
    Ok(beta.clamp(BB_CLAMP.0, BB_CLAMP.1))
}

/// The averaged reference value of the nonmonotone line search.
#[derive(Debug, Clone, Copy)]
pub struct LineSearchState {
    /// Reference value `C_k`, a convex combination of past objectives.
    pub c: f64,
    /// Accumulator `Q_k >= 1`.
    pub q_acc: f64,
    varpi: f64,
}

impl LineSearchState {
    /// State at the starting point: `C_0 = phi(x^0)`, `Q_0 = 1`.
    pub fn new(phi0: f64, varpi: f64) -> Self {
        Self {
            c: phi0,
            q_acc: 1.0,
            varpi,
        }
    }

    /// Folds the next iterate's objective into the reference value.
    pub fn advance(&mut self, phi_next: f64) {
        let q_new = self.varpi * self.q_acc + 1.0;
        self.c = (self.varpi * self.q_acc * self.c + phi_next) / q_new;
        self.q_acc = q_new;
    }
}

/// Accepted outcome of one line search.
#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    /// Accepted step `t_k = beta * delta^l`.
    pub t: f64,
    pub x_next: MatPoint,
    pub obj_next: f64,
    /// True when no backtrack satisfied the test and the last trial was
    /// taken anyway.
    pub exhausted: bool,
}

/// Backtracks `t = beta * delta^l` until the prox-gradient trial satisfies
/// the averaged sufficient-decrease test, then folds the accepted
/// objective into `ls`. `grad` must be the gradient of the smooth part at
/// `x`.
pub fn nonmonotone_linesearch(
    prob: &CompositeProblem,
    x: &MatPoint,
    grad: &MatPoint,
    beta: f64,
    ls: &mut LineSearchState,
    cfg: &SolverConfig,
) -> LineSearchOutcome {
    assert!(beta > 0.0, "trial step must be positive");
    let mut accepted: Option<(f64, MatPoint, f64)> = None;
    let mut last: Option<(f64, MatPoint, f64)> = None;
    for l in 0..=MAX_BACKTRACKS {
        let t = beta * cfg.delta.powi(l as i32);
        let inner = x - grad * t;
        let trial = prox(&prob.h, &inner, t)
            .expect("line-search step must stay inside the valid prox range")
            .point;
        let obj_trial = prob.objective(&trial);
        let bound = ls.c + cfg.varrho / (2.0 * t) * (&trial - x).norm_squared();
        if obj_trial <= bound {
            accepted = Some((t, trial, obj_trial));
            break;
        }
        last = Some((t, trial, obj_trial));
    }
    let (exhausted, (t, x_next, obj_next)) = match accepted {
        Some(hit) => (false, hit),
        None => {
            eprintln!(
                "warning: line search exhausted {MAX_BACKTRACKS} backtracks; taking the last trial"
            );
            (true, last.expect("at least one trial was evaluated"))
        }
    };
    ls.advance(obj_next);
    LineSearchOutcome {
        t,
        x_next,
        obj_next,
        exhausted,
    }
}

/// Runs proximal gradient descent with BB trial steps from `x0`
/// (projected onto the constraint set first).
pub fn run_proxgd(prob: &CompositeProblem, cfg: &SolverConfig, x0: &MatPoint) -> SolverReport {
    cfg.validate().expect("invalid solver configuration");
    let clock = Instant::now();

    let mut x = project_domain(&prob.h, x0);
    let mut grad = prob.f.gradient(&x);
    let mut obj = prob.objective(&x);
    let mut ls = LineSearchState::new(obj, cfg.varpi);
    // Step used by the stationarity measure and as the degenerate-curvature
    // fallback: the most recent accepted step.
    let mut last_t = prob.t;
    let mut prev_pair: Option<(MatPoint, MatPoint)> = None;

    let mut trace: Vec<TraceRecord> = Vec::new();
    let status;

    loop {
        let resid = residual_with_step(prob, &x, last_t).norm_f;
        let kkt = resid / (last_t * (1.0 + x.norm()));
        if kkt <= cfg.tol {
            status = Status::Converged;
            break;
        }
        if let Some(target) = cfg.obj_target {
            if obj <= target {
                status = Status::ObjectiveTarget;
                break;
            }
        }
        if trace.len() >= cfg.max_iter {
            status = Status::MaxIter;
            break;
        }

        let iter = trace.len();
        let mut beta = match &prev_pair {
            None => prob.t,
            Some((s, y)) => bb_stepsize(s, y, iter % 2 == 1).unwrap_or(last_t),
        };
        if let NonsmoothFn::Mcp { theta, .. } = prob.h {
            // Trial steps must stay strictly inside the valid prox range.
            beta = beta.min(0.99 * theta);
        }

        let out = nonmonotone_linesearch(prob, &x, &grad, beta, &mut ls, cfg);
        let grad_next = prob.f.gradient(&out.x_next);
        prev_pair = Some((&out.x_next - &x, &grad_next - &grad));
        x = out.x_next;
        obj = out.obj_next;
        grad = grad_next;
        last_t = out.t;

        trace.push(TraceRecord {
            iter,
            obj,
            residual_norm: resid,
            step: StepKind::ProxGrad,
            rho: 0.0,
        });
    }

    let kkt_err = residual_with_step(prob, &x, last_t).norm_f / (last_t * (1.0 + x.norm()));
    SolverReport {
        final_x: x,
        obj,
        kkt_err,
        iters: trace.len(),
        newton_accepted: 0,
        newton_rejected: 0,
        trace,
        wall_time_s: clock.elapsed().as_secs_f64(),
        status,
        t_used: prob.t,
        l_estimate: prob.f.lipschitz(),
    }
}
