//! The projected semismooth Newton method.
//!
//! Each outer iteration solves the regularized system
//! `(M + mu I) d = -F(x)` with `mu = kappa ||F(x)||`, projects the trial
//! `x + d` back onto the constraint set, and accepts the result only when
//! the residual shrank against the reference value `rho` and the objective
//! did not blow up:
//!
//! ```text
//! ||F(z)|| <= nu * rho           (residual contraction)
//! phi(z)  <= phi(x) + eta * rho^(1-q) ||F(z)||^q   (objective safeguard)
//! ```
//!
//! On acceptance `rho` is reset to `||F(z)||`; otherwise the iteration
//! falls back to a proximal gradient step. When the fixed step satisfies
//! `t <= 1/L` the fallback is the plain update `x - F(x)` (available for
//! free from the residual evaluation), whose sufficient decrease is
//! guaranteed. With spectral step sizes (`t L > 1`) that update is an
//! unstable fixed-point map, so the fallback instead backtracks from a
//! Barzilai-Borwein trial under the same nonmonotone test the gradient
//! solver uses; the residual map and the stationarity measure keep the
//! fixed `t` throughout.

use std::time::Instant;

use crate::config::SolverConfig;
use crate::nonsmooth::NonsmoothFn;
use crate::point::MatPoint;
use crate::problem::CompositeProblem;
use crate::prox::project_domain;
use crate::report::{SolverReport, Status, StepKind, TraceRecord};
use crate::residual::{natural_residual, JacobianOperator, ResidualEval};
use crate::solver::gmres::gmres;
use crate::solver::proxgd::{bb_stepsize, nonmonotone_linesearch, LineSearchState};

/// Decides conditions (residual contraction and objective safeguard) for a
/// projected Newton trial `z`. Returns the verdict; the caller updates
/// `rho` on acceptance.
pub fn accept_newton(
    norm_f_z: f64,
    obj_z: f64,
    obj_x: f64,
    rho: f64,
    cfg: &SolverConfig,
) -> bool {
    if norm_f_z > cfg.nu * rho {
        return false;
    }
    if norm_f_z == 0.0 {
        return obj_z <= obj_x;
    }
    // eta * rho^(1-q) * ||F(z)||^q, evaluated as eta * (||F(z)||/rho)^q * rho
    // so tiny rho cannot overflow the intermediate power.
    let slack = cfg.eta * (norm_f_z / rho).powf(cfg.q) * rho;
    obj_z <= obj_x + slack
}

/// Runs the projected semismooth Newton method from `x0` (projected onto
/// the constraint set first) until the scaled stationarity measure drops
/// below `cfg.tol`, the objective target is reached, or `cfg.max_iter`
/// outer steps have been taken.
pub fn run_proxssn(prob: &CompositeProblem, cfg: &SolverConfig, x0: &MatPoint) -> SolverReport {
    cfg.validate().expect("invalid solver configuration");
    let clock = Instant::now();
    let t = prob.t;
    // The plain fallback x - F(x) has guaranteed decrease only for
    // t <= 1/L; past that regime the fallback line-searches instead.
    let plain_fallback = t * prob.f.lipschitz() <= 1.0 + 1e-9;

    let mut x = project_domain(&prob.h, x0);
    let mut eval = natural_residual(prob, &x);
    let mut obj = prob.objective(&x);
    let mut rho = cfg.rho0.max(eval.norm_f);
    let mut ls = LineSearchState::new(obj, cfg.varpi);
    // Most recent accepted line-search step; doubles as the BB fallback
    // trial. The residual and stationarity measure always use `t`.
    let mut last_t = t;
    let mut prev_pair: Option<(MatPoint, MatPoint)> = None;

    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut newton_accepted = 0usize;
    let mut newton_rejected = 0usize;
    let status;

    loop {
        let kkt = eval.norm_f / (t * (1.0 + x.norm()));
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
        let res_before = eval.norm_f;

        let mut committed: Option<(MatPoint, ResidualEval, f64)> = None;
        let mut step = StepKind::ProxGrad;
        let newton_trial = newton_direction(prob, &x, &eval, cfg)
            .map(|d| project_domain(&prob.h, &(&x + d)));
        if let Some(z) = newton_trial {
            let eval_z = natural_residual(prob, &z);
            let obj_z = prob.objective(&z);
            if accept_newton(eval_z.norm_f, obj_z, obj, rho, cfg) {
                rho = eval_z.norm_f;
                newton_accepted += 1;
                step = StepKind::Newton;
                ls.advance(obj_z);
                committed = Some((z, eval_z, obj_z));
            } else {
                newton_rejected += 1;
            }
        }
        let (x_next, eval_next, obj_next) = match committed {
            Some(hit) => hit,
            None if plain_fallback => {
                // Fallback x - F(x) = prox_{t h}(x - t grad f(x)), already
                // evaluated as part of the residual.
                let x_next = eval.prox_info.point.clone();
                let eval_next = natural_residual(prob, &x_next);
                let obj_next = prob.objective(&x_next);
                ls.advance(obj_next);
                (x_next, eval_next, obj_next)
            }
            None => {
                let mut beta = match &prev_pair {
                    None => last_t,
                    Some((s, y)) => bb_stepsize(s, y, iter % 2 == 1).unwrap_or(last_t),
                };
                if let NonsmoothFn::Mcp { theta, .. } = prob.h {
                    beta = beta.min(0.99 * theta);
                }
                let out = nonmonotone_linesearch(prob, &x, &eval.grad, beta, &mut ls, cfg);
                last_t = out.t;
                let eval_next = natural_residual(prob, &out.x_next);
                (out.x_next, eval_next, out.obj_next)
            }
        };
        prev_pair = Some((&x_next - &x, &eval_next.grad - &eval.grad));
        x = x_next;
        eval = eval_next;
        obj = obj_next;

        trace.push(TraceRecord {
            iter,
            obj,
            residual_norm: res_before,
            step,
            rho,
        });
    }

    let kkt_err = eval.norm_f / (t * (1.0 + x.norm()));
    SolverReport {
        final_x: x,
        obj,
        kkt_err,
        iters: trace.len(),
        newton_accepted,
        newton_rejected,
        trace,
        wall_time_s: clock.elapsed().as_secs_f64(),
        status,
        t_used: t,
        l_estimate: prob.f.lipschitz(),
    }
}

/// Solves the regularized Newton system at `x`; `None` means the inner
/// solver stalled and the caller should fall back to a gradient step.
fn newton_direction(
    prob: &CompositeProblem,
    x: &MatPoint,
    eval: &ResidualEval,
    cfg: &SolverConfig,
) -> Option<MatPoint> {
    let mu = cfg.kappa * eval.norm_f;
    let op = JacobianOperator::new(prob, x, eval, mu);
    let rhs = -&eval.f;
    // Forcing-term tolerance: looser far out, tighter near a solution.
    let tol = cfg.krylov_tol.min(eval.norm_f).max(1e-12);
    gmres(|d| op.apply(d), &rhs, tol, cfg.krylov_maxit)
        .ok()
        .map(|out| out.direction)
}
