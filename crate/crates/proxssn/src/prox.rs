//! Closed-form proximal maps and their generalized Jacobians.
//!
//! Every map here evaluates `prox_{t h}(x) = argmin_u t h(u) + 1/2 ||u - x||^2`
//! for one of the supported nonsmooth terms. The oblique cases decouple over
//! columns. Writing `w = t lambda - |x|` for a column `x`, the L1 prox is
//!
//! ```text
//!   all w_j >= 0:  sign(x_{j*}) e_{j*},  j* = argmin_j w_j
//!   otherwise:     (-w^- . sign(x)) / ||w^-||_2,   w^- = min(w, 0)
//! ```
//!
//! i.e. soft-threshold then renormalize, with all mass collapsing onto the
//! largest entry when thresholding would wipe the column out. The
//! nonnegative case clips instead of thresholding. Throughout,
//! `sign(0) = +1` and index ties break toward the smallest index.
//!
//! The `dprox_*` functions apply one element of the B-subdifferential of the
//! prox. At points where an entry sits exactly on a threshold the strict
//! variants refuse; [`ProxJacobian`] instead resolves those entries as
//! inactive, which is a valid element choice for the Newton linearization.

use crate::nonsmooth::NonsmoothFn;
use crate::point::MatPoint;
use nalgebra::DVector;
use thiserror::Error;

/// Slack for detecting entries on an active-set boundary.
const BOUNDARY_TOL: f64 = 1e-12;

/// Norm below which a sphere projection has no unique answer.
const SPHERE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProxError {
    /// An entry sits on a threshold boundary, so the strict derivative does
    /// not exist; callers wanting a B-subdifferential element use
    /// [`ProxJacobian`].
    #[error("prox is nondifferentiable at entry ({row}, {col})")]
    NondifferentiablePoint { row: usize, col: usize },
    /// MCP prox needs `t < theta` for the shrink branch to stay expansive.
    #[error("step {t} is not below the concavity width theta = {theta}")]
    InvalidStep { t: f64, theta: f64 },
}

/// Which closed-form case fired for one column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnBranch {
    /// Thresholding wiped the column; the output is a signed coordinate
    /// vector at `index`.
    Vertex { index: usize },
    /// Generic branch (shrink/clip and renormalize, or elementwise MCP).
    Interior,
    /// Zero-norm sphere input mapped to `e1`.
    Degenerate,
}

/// Per-column record of the case taken and the entries that were zeroed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnCase {
    pub branch: ColumnBranch,
    pub zeroed: Vec<usize>,
}

/// Prox evaluation with enough structure to reconstruct the active sets.
#[derive(Debug, Clone)]
pub struct ProxResult {
    pub point: MatPoint,
    pub columns: Vec<ColumnCase>,
    /// Set when a zero-norm column forced the arbitrary `e1` fallback.
    pub degenerate: bool,
}

fn sgn(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Dispatch on the nonsmooth term.
pub fn prox(h: &NonsmoothFn, x: &MatPoint, t: f64) -> Result<ProxResult, ProxError> {
    match h {
        NonsmoothFn::L1Oblique { lambda, .. } => Ok(prox_l1_oblique(x, t, *lambda)),
        NonsmoothFn::NonnegOblique { .. } => Ok(prox_nonneg_oblique(x)),
        NonsmoothFn::Mcp { lambda, theta, .. } => prox_mcp(x, t, *lambda, *theta),
        NonsmoothFn::SphereIndicator { .. } => Ok(prox_sphere(x)),
    }
}

/// Prox of `lambda ||X||_1` restricted to unit columns.
pub fn prox_l1_oblique(x: &MatPoint, t: f64, lambda: f64) -> ProxResult {
    let (n, p) = x.shape();
    let shift = t * lambda;
    let mut out = MatPoint::zeros(n, p);
    let mut columns = Vec::with_capacity(p);
    for j in 0..p {
        let col = x.column(j);
        let mut all_thresholded = true;
        let mut norm_sq = 0.0;
        for i in 0..n {
            let w = shift - col[i].abs();
            if w < 0.0 {
                all_thresholded = false;
                norm_sq += w * w;
            }
        }
        if all_thresholded {
            // w_j = shift - |x_j| is minimized where |x_j| is largest.
            let mut j_star = 0;
            let mut best = f64::NEG_INFINITY;
            for i in 0..n {
                if col[i].abs() > best {
                    best = col[i].abs();
                    j_star = i;
                }
            }
            out[(j_star, j)] = sgn(col[j_star]);
            columns.push(ColumnCase {
                branch: ColumnBranch::Vertex { index: j_star },
                zeroed: (0..n).collect(),
            });
        } else {
            let norm = norm_sq.sqrt();
            let mut zeroed = Vec::new();
            for i in 0..n {
                let w = shift - col[i].abs();
                if w < 0.0 {
                    out[(i, j)] = -w * sgn(col[i]) / norm;
                } else {
                    zeroed.push(i);
                }
            }
            columns.push(ColumnCase {
                branch: ColumnBranch::Interior,
                zeroed,
            });
        }
    }
    ProxResult {
        point: out,
        columns,
        degenerate: false,
    }
}

/// Nearest point with unit-norm nonnegative columns. Independent of the
/// step size, as the term is an indicator.
pub fn prox_nonneg_oblique(x: &MatPoint) -> ProxResult {
    let (n, p) = x.shape();
    let mut out = MatPoint::zeros(n, p);
    let mut columns = Vec::with_capacity(p);
    for j in 0..p {
        let col = x.column(j);
        let mut norm_sq = 0.0;
        let mut any_positive = false;
        for i in 0..n {
            if col[i] > 0.0 {
                any_positive = true;
                norm_sq += col[i] * col[i];
            }
        }
        if any_positive {
            let norm = norm_sq.sqrt();
            let mut zeroed = Vec::new();
            for i in 0..n {
                if col[i] > 0.0 {
                    out[(i, j)] = col[i] / norm;
                } else {
                    zeroed.push(i);
                }
            }
            columns.push(ColumnCase {
                branch: ColumnBranch::Interior,
                zeroed,
            });
        } else {
            // Entirely nonpositive: the nearest feasible point is the vertex
            // at the largest (least negative) entry.
            let mut j_star = 0;
            let mut best = f64::NEG_INFINITY;
            for i in 0..n {
                if col[i] > best {
                    best = col[i];
                    j_star = i;
                }
            }
            out[(j_star, j)] = 1.0;
            columns.push(ColumnCase {
                branch: ColumnBranch::Vertex { index: j_star },
                zeroed: (0..n).collect(),
            });
        }
    }
    ProxResult {
        point: out,
        columns,
        degenerate: false,
    }
}

/// Elementwise minimax concave prox: dead zone, expansive shrink, identity.
pub fn prox_mcp(x: &MatPoint, t: f64, lambda: f64, theta: f64) -> Result<ProxResult, ProxError> {
    if t >= theta {
        return Err(ProxError::InvalidStep { t, theta });
    }
    let (n, p) = x.shape();
    let scale = 1.0 / (1.0 - t / theta);
    let mut out = MatPoint::zeros(n, p);
    let mut columns = Vec::with_capacity(p);
    for j in 0..p {
        let mut zeroed = Vec::new();
        for i in 0..n {
            let s = x[(i, j)];
            let a = s.abs();
            if a < t * lambda {
                zeroed.push(i);
            } else if a <= theta * lambda {
                out[(i, j)] = (s - t * lambda * sgn(s)) * scale;
            } else {
                out[(i, j)] = s;
            }
        }
        columns.push(ColumnCase {
            branch: ColumnBranch::Interior,
            zeroed,
        });
    }
    Ok(ProxResult {
        point: out,
        columns,
        degenerate: false,
    })
}

/// Columnwise radial projection onto the unit sphere. A numerically zero
/// column has no nearest point; it maps to `e1` and raises the degenerate
/// flag so callers can warn.
pub fn prox_sphere(x: &MatPoint) -> ProxResult {
    let (n, p) = x.shape();
    let mut out = MatPoint::zeros(n, p);
    let mut columns = Vec::with_capacity(p);
    let mut degenerate = false;
    for j in 0..p {
        let col = x.column(j);
        let norm = col.norm();
        if norm > SPHERE_TOL {
            for i in 0..n {
                out[(i, j)] = col[i] / norm;
            }
            columns.push(ColumnCase {
                branch: ColumnBranch::Interior,
                zeroed: Vec::new(),
            });
        } else {
            out[(0, j)] = 1.0;
            degenerate = true;
            columns.push(ColumnCase {
                branch: ColumnBranch::Degenerate,
                zeroed: (0..n).collect(),
            });
        }
    }
    ProxResult {
        point: out,
        columns,
        degenerate,
    }
}

/// Nearest-point projection onto `dom(h)`.
pub fn project_domain(h: &NonsmoothFn, x: &MatPoint) -> MatPoint {
    match h {
        NonsmoothFn::L1Oblique { .. } | NonsmoothFn::SphereIndicator { .. } => {
            prox_sphere(x).point
        }
        NonsmoothFn::NonnegOblique { .. } => prox_nonneg_oblique(x).point,
        NonsmoothFn::Mcp { .. } => x.clone(),
    }
}

/// Strict B-derivative action of the L1-oblique prox. Errors when any entry
/// magnitude sits within `1e-12` of the threshold `t lambda`.
pub fn dprox_l1_oblique(
    x: &MatPoint,
    t: f64,
    lambda: f64,
    u: &MatPoint,
) -> Result<MatPoint, ProxError> {
    let shift = t * lambda;
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if (x[(i, j)].abs() - shift).abs() <= BOUNDARY_TOL {
                return Err(ProxError::NondifferentiablePoint { row: i, col: j });
            }
        }
    }
    Ok(ProxJacobian::l1_oblique(x, t, lambda).apply(u))
}

/// Strict B-derivative action of the nonnegative-oblique prox. Errors when
/// any entry is within `1e-12` of zero.
pub fn dprox_nonneg_oblique(x: &MatPoint, u: &MatPoint) -> Result<MatPoint, ProxError> {
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if x[(i, j)].abs() <= BOUNDARY_TOL {
                return Err(ProxError::NondifferentiablePoint { row: i, col: j });
            }
        }
    }
    Ok(ProxJacobian::nonneg_oblique(x).apply(u))
}

/// Strict elementwise derivative of the MCP prox. Errors at branch kinks.
pub fn dprox_mcp(
    x: &MatPoint,
    t: f64,
    lambda: f64,
    theta: f64,
    u: &MatPoint,
) -> Result<MatPoint, ProxError> {
    if t >= theta {
        return Err(ProxError::InvalidStep { t, theta });
    }
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            let a = x[(i, j)].abs();
            if (a - t * lambda).abs() <= BOUNDARY_TOL || (a - theta * lambda).abs() <= BOUNDARY_TOL
            {
                return Err(ProxError::NondifferentiablePoint { row: i, col: j });
            }
        }
    }
    Ok(ProxJacobian::mcp(x, t, lambda, theta).apply(u))
}

/// Derivative action of the radial projection: scaled tangential projector
/// `(I - u u^T) d / ||x||` with `u = x / ||x||`.
pub fn dprox_sphere(x: &MatPoint, d: &MatPoint) -> MatPoint {
    ProxJacobian::sphere(x).apply(d)
}

/// Linearization of a prox map at a base point, with every active set
/// resolved up front. Applying it is exactly linear in the direction, which
/// the matrix-free Newton solve relies on.
///
/// Boundary entries (within `1e-12` of a threshold) are resolved as
/// inactive, i.e. toward the branch that zeroes them for the oblique kinds
/// and toward the shrink branch for MCP kinks.
#[derive(Debug, Clone)]
pub struct ProxJacobian {
    plan: Plan,
    shape: (usize, usize),
    boundary_hits: usize,
}

#[derive(Debug, Clone)]
enum Plan {
    /// Per column: `None` for locally constant (vertex) columns, otherwise
    /// the surviving-entry mask, the signed threshold residual vector, and
    /// its norm.
    Rescale(Vec<Option<RescalePlan>>),
    /// Elementwise slopes.
    Diagonal(MatPoint),
}

#[derive(Debug, Clone)]
struct RescalePlan {
    mask: Vec<bool>,
    axis: DVector<f64>,
    norm: f64,
}

impl ProxJacobian {
    pub fn for_kind(h: &NonsmoothFn, x: &MatPoint, t: f64) -> Self {
        match h {
            NonsmoothFn::L1Oblique { lambda, .. } => ProxJacobian::l1_oblique(x, t, *lambda),
            NonsmoothFn::NonnegOblique { .. } => ProxJacobian::nonneg_oblique(x),
            NonsmoothFn::Mcp { lambda, theta, .. } => ProxJacobian::mcp(x, t, *lambda, *theta),
            NonsmoothFn::SphereIndicator { .. } => ProxJacobian::sphere(x),
        }
    }

    pub fn l1_oblique(x: &MatPoint, t: f64, lambda: f64) -> Self {
        let (n, p) = x.shape();
        let shift = t * lambda;
        let mut cols = Vec::with_capacity(p);
        let mut boundary_hits = 0;
        for j in 0..p {
            let col = x.column(j);
            let mut mask = vec![false; n];
            let mut axis = DVector::zeros(n);
            let mut norm_sq = 0.0;
            for i in 0..n {
                let w = shift - col[i].abs();
                if w.abs() <= BOUNDARY_TOL {
                    boundary_hits += 1;
                }
                // Active means surviving the threshold; boundary entries
                // (|w| <= tol) count as thresholded.
                if w < -BOUNDARY_TOL {
                    mask[i] = true;
                    axis[i] = w * sgn(col[i]);
                    norm_sq += w * w;
                }
            }
            if norm_sq > 0.0 {
                cols.push(Some(RescalePlan {
                    mask,
                    axis,
                    norm: norm_sq.sqrt(),
                }));
            } else {
                cols.push(None);
            }
        }
        ProxJacobian {
            plan: Plan::Rescale(cols),
            shape: (n, p),
            boundary_hits,
        }
    }

    pub fn nonneg_oblique(x: &MatPoint) -> Self {
        let (n, p) = x.shape();
        let mut cols = Vec::with_capacity(p);
        let mut boundary_hits = 0;
        for j in 0..p {
            let col = x.column(j);
            let mut mask = vec![false; n];
            let mut axis = DVector::zeros(n);
            let mut norm_sq = 0.0;
            for i in 0..n {
                if col[i].abs() <= BOUNDARY_TOL {
                    boundary_hits += 1;
                } else if col[i] > 0.0 {
                    mask[i] = true;
                    axis[i] = col[i];
                    norm_sq += col[i] * col[i];
                }
            }
            if norm_sq > 0.0 {
                cols.push(Some(RescalePlan {
                    mask,
                    axis,
                    norm: norm_sq.sqrt(),
                }));
            } else {
                cols.push(None);
            }
        }
        ProxJacobian {
            plan: Plan::Rescale(cols),
            shape: (n, p),
            boundary_hits,
        }
    }

    pub fn mcp(x: &MatPoint, t: f64, lambda: f64, theta: f64) -> Self {
        assert!(t < theta, "mcp prox needs t < theta");
        let (n, p) = x.shape();
        let shrink = 1.0 / (1.0 - t / theta);
        let mut slopes = MatPoint::zeros(n, p);
        let mut boundary_hits = 0;
        for j in 0..p {
            for i in 0..n {
                let a = x[(i, j)].abs();
                if (a - t * lambda).abs() <= BOUNDARY_TOL
                    || (a - theta * lambda).abs() <= BOUNDARY_TOL
                {
                    boundary_hits += 1;
                }
                slopes[(i, j)] = if a < t * lambda - BOUNDARY_TOL {
                    0.0
                } else if a <= theta * lambda + BOUNDARY_TOL {
                    // Kinks at both ends resolve to the shrink slope.
                    shrink
                } else {
                    1.0
                };
            }
        }
        ProxJacobian {
            plan: Plan::Diagonal(slopes),
            shape: (n, p),
            boundary_hits,
        }
    }

    pub fn sphere(x: &MatPoint) -> Self {
        let (n, p) = x.shape();
        let mut cols = Vec::with_capacity(p);
        for j in 0..p {
            let col = x.column(j);
            let norm = col.norm();
            if norm > SPHERE_TOL {
                cols.push(Some(RescalePlan {
                    mask: vec![true; n],
                    axis: col.clone_owned(),
                    norm,
                }));
            } else {
                // The e1 fallback is locally constant.
                cols.push(None);
            }
        }
        ProxJacobian {
            plan: Plan::Rescale(cols),
            shape: (n, p),
            boundary_hits: 0,
        }
    }

    /// Applies the linearization to a direction.
    pub fn apply(&self, u: &MatPoint) -> MatPoint {
        assert_eq!(u.shape(), self.shape, "direction shape mismatch");
        match &self.plan {
            Plan::Diagonal(slopes) => slopes.component_mul(u),
            Plan::Rescale(cols) => {
                let (n, p) = self.shape;
                let mut out = MatPoint::zeros(n, p);
                for (j, plan) in cols.iter().enumerate() {
                    let Some(plan) = plan else { continue };
                    let ucol = u.column(j);
                    let mut dot = 0.0;
                    for i in 0..n {
                        if plan.mask[i] {
                            dot += plan.axis[i] * ucol[i];
                        }
                    }
                    let inv = 1.0 / plan.norm;
                    let inv3 = inv * inv * inv;
                    for i in 0..n {
                        if plan.mask[i] {
                            out[(i, j)] = ucol[i] * inv - plan.axis[i] * dot * inv3;
                        }
                    }
                }
                out
            }
        }
    }

    /// Number of base-point entries that sat on a threshold and were
    /// resolved as inactive rather than differentiated.
    pub fn resolved_boundaries(&self) -> usize {
        self.boundary_hits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_prox, finite_difference_apply, prox_objective, GridSpec};
    use crate::point::col_point;
    use crate::problems::rng::Rng;

    /// Samples `X + tV` with `X` on the constraint set, `||V||_2 = 1`, and
    /// `t` in the upper part of `[0, gamma]`; returns the point and `t`.
    fn sample_tube(rng: &mut Rng, n: usize, gamma: f64, nonneg: bool) -> (MatPoint, f64) {
        let mut base = MatPoint::zeros(n, 1);
        loop {
            for i in 0..n {
                let g = rng.normal();
                base[(i, 0)] = if nonneg { g.abs() } else { g };
            }
            if base.norm() > 1e-6 {
                break;
            }
        }
        base /= base.norm();
        let mut dir = MatPoint::zeros(n, 1);
        loop {
            for i in 0..n {
                dir[(i, 0)] = rng.normal();
            }
            if dir.norm() > 1e-6 {
                break;
            }
        }
        dir /= dir.norm();
        let t = gamma * rng.range(0.2, 1.0);
        (base + dir * t, t)
    }

    #[test]
    fn l1_sparse_unit_vector_is_fixed() {
        let x = col_point(&[1.0, 0.0]);
        let got = prox_l1_oblique(&x, 0.1, 1.0);
        assert!((got.point - &x).norm() < 1e-15);
    }

    #[test]
    fn l1_shrink_branch_matches_formula_and_grid() {
        let x = col_point(&[0.8, 0.3]);
        let (t, lambda) = (0.1, 1.0);
        let got = prox_l1_oblique(&x, t, lambda);
        let scale = 0.53f64.sqrt();
        let want = col_point(&[0.7 / scale, 0.2 / scale]);
        assert!((&got.point - &want).norm() < 1e-12);
        assert_eq!(got.columns[0].branch, ColumnBranch::Interior);

        let grid = brute_force_prox(
            &NonsmoothFn::l1_oblique(lambda, 2),
            &x,
            t,
            &GridSpec::circle(1e-5),
        );
        let closed_obj = prox_objective(&NonsmoothFn::l1_oblique(lambda, 2), &x, t, &got.point);
        assert!(closed_obj <= grid.objective + 1e-8);
        assert!((&got.point - &grid.point).norm() < 3e-5);
    }

    #[test]
    fn l1_vertex_branch_collapses_to_largest_entry() {
        let x = col_point(&[0.05, 0.02]);
        let (t, lambda) = (0.1, 1.0);
        let got = prox_l1_oblique(&x, t, lambda);
        assert_eq!(got.point, col_point(&[1.0, 0.0]));
        assert_eq!(got.columns[0].branch, ColumnBranch::Vertex { index: 0 });

        let grid = brute_force_prox(
            &NonsmoothFn::l1_oblique(lambda, 2),
            &x,
            t,
            &GridSpec::circle(1e-5),
        );
        let closed_obj = prox_objective(&NonsmoothFn::l1_oblique(lambda, 2), &x, t, &got.point);
        assert!(closed_obj <= grid.objective + 1e-8);
    }

    #[test]
    fn l1_negative_entry_keeps_its_sign() {
        let x = col_point(&[-0.8, 0.3]);
        let got = prox_l1_oblique(&x, 0.1, 1.0);
        let scale = 0.53f64.sqrt();
        assert!((got.point[(0, 0)] + 0.7 / scale).abs() < 1e-12);
        assert!((got.point[(1, 0)] - 0.2 / scale).abs() < 1e-12);
    }

    #[test]
    fn nonneg_feasible_point_is_fixed() {
        let x = col_point(&[0.6, 0.8]);
        let got = prox_nonneg_oblique(&x);
        assert!((got.point - &x).norm() < 1e-15);
    }

    #[test]
    fn nonneg_clips_then_normalizes() {
        let x = col_point(&[0.3, -0.4]);
        let got = prox_nonneg_oblique(&x);
        assert_eq!(got.point, col_point(&[1.0, 0.0]));
        assert_eq!(got.columns[0].zeroed, vec![1]);

        let h = NonsmoothFn::nonneg_oblique();
        let grid = brute_force_prox(&h, &x, 0.3, &GridSpec::circle(1e-5));
        let closed_obj = prox_objective(&h, &x, 0.3, &got.point);
        assert!(closed_obj <= grid.objective + 1e-8);
    }

    #[test]
    fn nonneg_all_nonpositive_takes_least_negative_vertex() {
        // Distance^2 from (-1, -2) is 8 at e1 versus 10 at e2.
        let x = col_point(&[-1.0, -2.0]);
        let got = prox_nonneg_oblique(&x);
        assert_eq!(got.point, col_point(&[1.0, 0.0]));
        assert_eq!(got.columns[0].branch, ColumnBranch::Vertex { index: 0 });

        let h = NonsmoothFn::nonneg_oblique();
        let grid = brute_force_prox(&h, &x, 1.0, &GridSpec::circle(1e-5));
        let closed_obj = prox_objective(&h, &x, 1.0, &got.point);
        assert!(closed_obj <= grid.objective + 1e-8);
    }

    #[test]
    fn mcp_three_branches() {
        let (t, lambda, theta) = (1.0, 1.0, 4.0);
        let dead = prox_mcp(&col_point(&[0.5]), t, lambda, theta).unwrap();
        assert_eq!(dead.point[(0, 0)], 0.0);
        assert_eq!(dead.columns[0].zeroed, vec![0]);

        let shrink = prox_mcp(&col_point(&[2.0]), t, lambda, theta).unwrap();
        assert!((shrink.point[(0, 0)] - 4.0 / 3.0).abs() < 1e-15);

        let identity = prox_mcp(&col_point(&[5.0]), t, lambda, theta).unwrap();
        assert_eq!(identity.point[(0, 0)], 5.0);
    }

    #[test]
    fn mcp_shrink_matches_line_grid() {
        let (t, lambda, theta) = (1.0, 1.0, 4.0);
        let h = NonsmoothFn::mcp(lambda, theta);
        let x = col_point(&[2.0]);
        let got = prox_mcp(&x, t, lambda, theta).unwrap();
        let grid = brute_force_prox(&h, &x, t, &GridSpec::line(1e-6, -6.0, 6.0));
        let closed_obj = prox_objective(&h, &x, t, &got.point);
        assert!(closed_obj <= grid.objective + 1e-8);
        assert!((got.point[(0, 0)] - grid.point[(0, 0)]).abs() < 2e-6);
    }

    #[test]
    fn mcp_rejects_step_at_or_above_theta() {
        let x = col_point(&[1.0]);
        assert!(matches!(
            prox_mcp(&x, 4.0, 1.0, 4.0),
            Err(ProxError::InvalidStep { .. })
        ));
    }

    #[test]
    fn sphere_normalizes_and_flags_zero() {
        let x = col_point(&[3.0, 4.0, 0.0, 0.0]);
        let got = prox_sphere(&x);
        assert!((got.point - col_point(&[0.6, 0.8, 0.0, 0.0])).norm() < 1e-15);
        assert!(!got.degenerate);

        let zero = prox_sphere(&col_point(&[0.0, 0.0, 0.0]));
        assert_eq!(zero.point, col_point(&[1.0, 0.0, 0.0]));
        assert!(zero.degenerate);
        assert_eq!(zero.columns[0].branch, ColumnBranch::Degenerate);
    }

    #[test]
    fn project_domain_covers_all_kinds() {
        let l1 = NonsmoothFn::l1_oblique(1.0, 2);
        assert!((project_domain(&l1, &col_point(&[3.0, 4.0])) - col_point(&[0.6, 0.8])).norm()
            < 1e-15);

        let feasible = col_point(&[0.6, 0.8]);
        assert!((project_domain(&l1, &feasible) - &feasible).norm() < 1e-15);

        let mcp = NonsmoothFn::mcp(1.0, 4.0);
        let any = col_point(&[7.0, -3.0]);
        assert_eq!(project_domain(&mcp, &any), any);

        let nn = NonsmoothFn::nonneg_oblique();
        let proj = project_domain(&nn, &col_point(&[-0.5, 0.5]));
        assert_eq!(proj, col_point(&[0.0, 1.0]));
    }

    #[test]
    fn projection_is_two_lipschitz_toward_feasible_points() {
        // ||P(x) - y|| <= 2 ||x - y|| for y already feasible.
        let mut rng = Rng::new(2024);
        for h in [
            NonsmoothFn::l1_oblique(0.5, 4),
            NonsmoothFn::nonneg_oblique(),
            NonsmoothFn::sphere(),
        ] {
            for _ in 0..500 {
                let nonneg = matches!(h, NonsmoothFn::NonnegOblique { .. });
                let mut x = MatPoint::zeros(4, 1);
                for i in 0..4 {
                    x[(i, 0)] = 2.0 * rng.normal();
                }
                let (y, _) = sample_tube(&mut rng, 4, 0.0, nonneg);
                let px = project_domain(&h, &x);
                assert!((&px - &y).norm() <= 2.0 * (&x - &y).norm() + 1e-12);
            }
        }
    }

    #[test]
    fn dprox_l1_matches_finite_differences() {
        let x = col_point(&[0.8, 0.3]);
        let (t, lambda) = (0.1, 1.0);
        let u = col_point(&[1.0, 0.0]);
        let got = dprox_l1_oblique(&x, t, lambda, &u).unwrap();
        let fd = finite_difference_apply(
            |y| prox_l1_oblique(y, t, lambda).point,
            &x,
            &u,
            1e-6,
        );
        assert!((&got - &fd).norm() / got.norm().max(1e-30) < 1e-5);
    }

    #[test]
    fn dprox_is_zero_on_zero_direction() {
        let x = col_point(&[0.8, 0.3]);
        let zero = MatPoint::zeros(2, 1);
        assert_eq!(dprox_l1_oblique(&x, 0.1, 1.0, &zero).unwrap(), zero);
        let xn = col_point(&[0.3, -0.4]);
        assert_eq!(dprox_nonneg_oblique(&xn, &zero).unwrap(), zero);
    }

    #[test]
    fn dprox_nonneg_matches_finite_differences() {
        let x = col_point(&[0.3, -0.4]);
        let u = col_point(&[0.0, 1.0]);
        let got = dprox_nonneg_oblique(&x, &u).unwrap();
        let fd = finite_difference_apply(|y| prox_nonneg_oblique(y).point, &x, &u, 1e-6);
        // The derivative annihilates directions feeding only clipped
        // entries, so compare absolutely.
        assert!((&got - &fd).norm() < 1e-5);
    }

    #[test]
    fn dprox_mcp_slopes() {
        let (t, lambda, theta) = (1.0, 1.0, 4.0);
        let u = col_point(&[1.0]);
        let shrink = dprox_mcp(&col_point(&[2.0]), t, lambda, theta, &u).unwrap();
        assert!((shrink[(0, 0)] - 4.0 / 3.0).abs() < 1e-15);
        let fd = finite_difference_apply(
            |y| prox_mcp(y, t, lambda, theta).unwrap().point,
            &col_point(&[2.0]),
            &u,
            1e-6,
        );
        assert!((shrink[(0, 0)] - fd[(0, 0)]).abs() < 1e-5);

        let ident = dprox_mcp(&col_point(&[5.0]), t, lambda, theta, &u).unwrap();
        assert_eq!(ident[(0, 0)], 1.0);

        let dead = dprox_mcp(&col_point(&[0.5]), t, lambda, theta, &u).unwrap();
        assert_eq!(dead[(0, 0)], 0.0);
    }

    #[test]
    fn dprox_sphere_annihilates_radial_and_keeps_tangent() {
        let x = col_point(&[0.6, 0.8]);
        let radial = dprox_sphere(&x, &x);
        assert!(radial.norm() < 1e-15);
        let tangent = col_point(&[-0.8, 0.6]);
        let kept = dprox_sphere(&x, &tangent);
        assert!((kept - &tangent).norm() < 1e-12);

        let any = col_point(&[1.3, -0.4]);
        let d = col_point(&[0.2, 0.9]);
        let fd = finite_difference_apply(|y| prox_sphere(y).point, &any, &d, 1e-6);
        assert!((dprox_sphere(&any, &d) - fd).norm() < 1e-5);
    }

    #[test]
    fn dprox_refuses_threshold_boundaries() {
        // |x_0| = t*lambda exactly.
        let x = col_point(&[0.1, 0.5]);
        assert!(matches!(
            dprox_l1_oblique(&x, 0.1, 1.0, &col_point(&[1.0, 1.0])),
            Err(ProxError::NondifferentiablePoint { row: 0, col: 0 })
        ));
        let xz = col_point(&[0.0, 0.4]);
        assert!(dprox_nonneg_oblique(&xz, &col_point(&[1.0, 1.0])).is_err());
        assert!(dprox_mcp(&col_point(&[1.0]), 1.0, 1.0, 4.0, &col_point(&[1.0])).is_err());
    }

    #[test]
    fn jacobian_resolves_boundaries_without_failing() {
        let x = col_point(&[0.1, 0.5]);
        let plan = ProxJacobian::l1_oblique(&x, 0.1, 1.0);
        assert_eq!(plan.resolved_boundaries(), 1);
        // The boundary entry is treated as thresholded: only the surviving
        // entry contributes.
        let out = plan.apply(&col_point(&[1.0, 1.0]));
        assert_eq!(out[(0, 0)], 0.0);
    }

    #[test]
    fn jacobian_quadratic_form_is_nonnegative_per_column() {
        let mut rng = Rng::new(31);
        for _ in 0..1000 {
            let n = 2 + rng.index(4);
            let mut x = MatPoint::zeros(n, 2);
            let mut u = MatPoint::zeros(n, 2);
            for j in 0..2 {
                for i in 0..n {
                    x[(i, j)] = 1.5 * rng.normal();
                    u[(i, j)] = rng.normal();
                }
            }
            let plans = [
                ProxJacobian::l1_oblique(&x, 0.15, 1.0),
                ProxJacobian::nonneg_oblique(&x),
            ];
            for plan in plans {
                let out = plan.apply(&u);
                for j in 0..2 {
                    let dot = out.column(j).dot(&u.column(j));
                    assert!(dot >= -1e-12, "column form {dot} negative");
                }
            }
        }
    }

    #[test]
    fn prox_outputs_are_feasible() {
        let mut rng = Rng::new(77);
        for _ in 0..500 {
            let n = 2 + rng.index(5);
            let mut x = MatPoint::zeros(n, 3);
            for j in 0..3 {
                for i in 0..n {
                    x[(i, j)] = 2.0 * rng.normal();
                }
            }
            let l1 = prox_l1_oblique(&x, 0.2, 0.8);
            for c in l1.point.column_iter() {
                assert!((c.norm() - 1.0).abs() <= 1e-12);
            }
            let nn = prox_nonneg_oblique(&x);
            for c in nn.point.column_iter() {
                assert!((c.norm() - 1.0).abs() <= 1e-12);
                assert!(c.iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn prox_is_monotone_on_the_tube() {
        let mut rng = Rng::new(1213);
        let lambda = 0.5;
        let n = 3;
        let gamma_l1 = 1.0 / ((lambda + 1.0) * n as f64);
        for _ in 0..1000 {
            let (x, t) = sample_tube(&mut rng, n, gamma_l1, false);
            let (y, _) = sample_tube(&mut rng, n, gamma_l1, false);
            let px = prox_l1_oblique(&x, t, lambda).point;
            let py = prox_l1_oblique(&y, t, lambda).point;
            let inner = (&px - &py).dot(&(&x - &y));
            assert!(inner >= -1e-10, "monotonicity violated: {inner}");
        }
        for _ in 0..1000 {
            let (x, _) = sample_tube(&mut rng, n, 0.5, true);
            let (y, _) = sample_tube(&mut rng, n, 0.5, true);
            let px = prox_nonneg_oblique(&x).point;
            let py = prox_nonneg_oblique(&y).point;
            let inner = (&px - &py).dot(&(&x - &y));
            assert!(inner >= -1e-10, "monotonicity violated: {inner}");
        }
    }

    #[test]
    fn lipschitz_witness_on_the_tube_is_modest() {
        // The maps are Lipschitz on the prox-regular tube; report the
        // observed modulus rather than asserting a theoretical one.
        let mut rng = Rng::new(4321);
        let lambda = 0.5;
        let n = 3;
        let gamma = 1.0 / ((lambda + 1.0) * n as f64);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let (x, t) = sample_tube(&mut rng, n, gamma, false);
            let (y, _) = sample_tube(&mut rng, n, gamma, false);
            let gap = (&x - &y).norm();
            if gap < 1e-8 {
                continue;
            }
            let px = prox_l1_oblique(&x, t, lambda).point;
            let py = prox_l1_oblique(&y, t, lambda).point;
            worst = worst.max((px - py).norm() / gap);
        }
        println!("observed prox Lipschitz modulus on tube: {worst:.3}");
        assert!(worst < 10.0, "modulus {worst} implausibly large");
    }

    #[test]
    fn closed_forms_beat_coarse_grids_on_sampled_tube_points() {
        // Smoke version of the exhaustive grid comparison in the acceptance
        // suite: fewer samples, smaller lattice.
        let mut rng = Rng::new(555);
        let lambda = 0.6;
        for _ in 0..40 {
            let n2 = 1.0 / ((lambda + 1.0) * 2.0);
            let (x, t) = sample_tube(&mut rng, 2, n2, false);
            let h = NonsmoothFn::l1_oblique(lambda, 2);
            let closed = prox_l1_oblique(&x, t, lambda);
            let grid = brute_force_prox(&h, &x, t, &GridSpec::circle(1e-4));
            assert!(prox_objective(&h, &x, t, &closed.point) <= grid.objective + 1e-8);
        }
        for _ in 0..15 {
            let n3 = 1.0 / ((lambda + 1.0) * 3.0);
            let (x, t) = sample_tube(&mut rng, 3, n3, false);
            let h = NonsmoothFn::l1_oblique(lambda, 3);
            let closed = prox_l1_oblique(&x, t, lambda);
            let grid = brute_force_prox(&h, &x, t, &GridSpec::sphere(1_000_000));
            assert!(prox_objective(&h, &x, t, &closed.point) <= grid.objective + 1e-8);
        }
        for _ in 0..15 {
            let (x, t) = sample_tube(&mut rng, 3, 0.5, true);
            let h = NonsmoothFn::nonneg_oblique();
            let closed = prox_nonneg_oblique(&x);
            let grid = brute_force_prox(&h, &x, t, &GridSpec::sphere(1_000_000));
            assert!(prox_objective(&h, &x, t, &closed.point) <= grid.objective + 1e-8);
        }
    }
}
