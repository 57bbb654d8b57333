//! Brute-force and finite-difference oracles.
//!
//! Everything here deliberately avoids the closed-form proximal maps in
//! [`crate::prox`]: minimizers come from sweeping explicit grids of the
//! constraint set and derivatives come from central differences. Tests
//! compare the fast implementations against these slow ones.

use crate::nonsmooth::NonsmoothFn;
use crate::point::MatPoint;

/// Golden angle in radians, the azimuth increment of the Fibonacci lattice.
const GOLDEN_ANGLE: f64 = 2.399963229728653;

/// Steps between exact re-anchoring of the incremental azimuth rotation.
const ANCHOR_EVERY: usize = 1024;

/// Search grid for [`brute_force_prox`].
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// Angular sweep of the unit circle (n = 2), step in radians.
    Circle { step: f64 },
    /// Spherical Fibonacci lattice (n = 3).
    Sphere { points: usize },
    /// Uniform 1-D grid (scalar prox).
    Line { step: f64, lo: f64, hi: f64 },
}

impl GridSpec {
    pub fn circle(step: f64) -> Self {
        assert!(step > 0.0 && step < 1.0, "angular step must be in (0, 1)");
        GridSpec::Circle { step }
    }

    pub fn sphere(points: usize) -> Self {
        assert!(points >= 100, "sphere lattice needs at least 100 points");
        GridSpec::Sphere { points }
    }

    pub fn line(step: f64, lo: f64, hi: f64) -> Self {
        assert!(step > 0.0 && lo < hi, "need positive step and lo < hi");
        GridSpec::Line { step, lo, hi }
    }

    /// Grid resolution: angular or linear step, or the covering estimate
    /// `3.5 / sqrt(points)` of the Fibonacci lattice.
    pub fn resolution(&self) -> f64 {
        match self {
            GridSpec::Circle { step } | GridSpec::Line { step, .. } => *step,
            GridSpec::Sphere { points } => 3.5 / (*points as f64).sqrt(),
        }
    }
}

/// Best grid candidate found by a sweep.
#[derive(Debug, Clone)]
pub struct GridMin {
    pub point: MatPoint,
    pub objective: f64,
}

/// Value of the prox objective `t h(u) + 1/2 ||u - x||^2` at a feasible
/// candidate `u`, bypassing indicator checks (the caller guarantees `u`
/// lies on the grid of the constraint set).
pub fn prox_objective(h: &NonsmoothFn, x: &MatPoint, t: f64, u: &MatPoint) -> f64 {
    t * penalty_part(h, u.as_slice()) + 0.5 * (u - x).norm_squared()
}

/// First-order bound on how much the swept minimum can sit above the true
/// one: Lipschitz constant of the prox objective over the search set times
/// the grid resolution.
pub fn grid_slack(h: &NonsmoothFn, x: &MatPoint, t: f64, grid: &GridSpec) -> f64 {
    let reach = match grid {
        GridSpec::Circle { .. } | GridSpec::Sphere { .. } => x.norm() + 1.0,
        GridSpec::Line { lo, hi, .. } => {
            let x0 = x[(0, 0)];
            (x0 - lo).abs().max((x0 - hi).abs())
        }
    };
    let lam = match h {
        NonsmoothFn::L1Oblique { lambda, .. } => lambda * (x.nrows() as f64).sqrt(),
        NonsmoothFn::Mcp { lambda, .. } => *lambda,
        _ => 0.0,
    };
    (reach + t * lam) * grid.resolution()
}

/// Minimizes the prox objective over the grid by exhaustive sweep.
///
/// The lattice sweep for n = 3 rotates the lattice so the polar axis points
/// at `x`, takes an upper bound `B` from a coarse sub-lattice, and then only
/// evaluates the contiguous polar band of indices whose distance term alone
/// could still beat `B`. Every skipped point provably exceeds the returned
/// objective, so the result equals a full sweep.
pub fn brute_force_prox(h: &NonsmoothFn, x: &MatPoint, t: f64, grid: &GridSpec) -> GridMin {
    assert!(t > 0.0, "prox step must be positive");
    let nonneg = matches!(h, NonsmoothFn::NonnegOblique { .. });
    match grid {
        GridSpec::Circle { step } => {
            assert_eq!(x.nrows(), 2, "circle grid needs n = 2");
            circle_sweep(h, x, t, *step, nonneg)
        }
        GridSpec::Sphere { points } => {
            assert_eq!(x.nrows(), 3, "sphere lattice needs n = 3");
            sphere_sweep(h, x, t, *points, nonneg)
        }
        GridSpec::Line { step, lo, hi } => {
            assert_eq!(x.nrows(), 1, "line grid is scalar");
            line_sweep(h, x[(0, 0)], t, *step, *lo, *hi)
        }
    }
}

/// Central-difference directional derivative `(map(x + s d) - map(x - s d)) / 2s`.
pub fn finite_difference_apply<F>(map: F, x: &MatPoint, d: &MatPoint, step: f64) -> MatPoint
where
    F: Fn(&MatPoint) -> MatPoint,
{
    check_fd_step(step);
    let plus = map(&(x + d * step));
    let minus = map(&(x - d * step));
    (plus - minus) / (2.0 * step)
}

/// Entrywise central-difference gradient of a scalar function.
pub fn finite_difference_gradient<F>(f: F, x: &MatPoint, step: f64) -> MatPoint
where
    F: Fn(&MatPoint) -> f64,
{
    check_fd_step(step);
    let mut g = MatPoint::zeros(x.nrows(), x.ncols());
    let mut xp = x.clone();
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            let orig = xp[(i, j)];
            xp[(i, j)] = orig + step;
            let fp = f(&xp);
            xp[(i, j)] = orig - step;
            let fm = f(&xp);
            xp[(i, j)] = orig;
            g[(i, j)] = (fp - fm) / (2.0 * step);
        }
    }
    g
}

fn check_fd_step(step: f64) {
    assert!(
        (1e-8..=1e-4).contains(&step),
        "difference step {step} outside the trustworthy range [1e-8, 1e-4]"
    );
}

fn penalty_part(h: &NonsmoothFn, u: &[f64]) -> f64 {
    match h {
        NonsmoothFn::L1Oblique { lambda, .. } => lambda * u.iter().map(|v| v.abs()).sum::<f64>(),
        NonsmoothFn::NonnegOblique { .. } | NonsmoothFn::SphereIndicator { .. } => 0.0,
        NonsmoothFn::Mcp { lambda, theta, .. } => u
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
    }
}

fn circle_sweep(h: &NonsmoothFn, x: &MatPoint, t: f64, step: f64, nonneg: bool) -> GridMin {
    let (x0, x1) = (x[(0, 0)], x[(1, 0)]);
    let count = (std::f64::consts::TAU / step).ceil() as usize;
    let mut best = [1.0, 0.0];
    let mut best_obj = f64::INFINITY;
    for k in 0..count {
        let th = k as f64 * step;
        let u = [th.cos(), th.sin()];
        if nonneg && (u[0] < 0.0 || u[1] < 0.0) {
            continue;
        }
        let dist2 = (u[0] - x0).powi(2) + (u[1] - x1).powi(2);
        let obj = t * penalty_part(h, &u) + 0.5 * dist2;
        if obj < best_obj {
            best_obj = obj;
            best = u;
        }
    }
    GridMin {
        point: MatPoint::from_column_slice(2, 1, &best),
        objective: best_obj,
    }
}

/// Reflection matrix (rows) taking e3 to the unit vector `w`.
fn reflection_to(w: [f64; 3]) -> [[f64; 3]; 3] {
    let v = [-w[0], -w[1], 1.0 - w[2]];
    let vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if vv < 1e-24 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let mut r = [[0.0f64; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let id = if i == j { 1.0 } else { 0.0 };
            *entry = id - 2.0 * v[i] * v[j] / vv;
        }
    }
    r
}

fn lattice_point(i: usize, n: usize) -> [f64; 3] {
    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = (i as f64 * GOLDEN_ANGLE) % std::f64::consts::TAU;
    [r * phi.cos(), r * phi.sin(), z]
}

fn sphere_sweep(h: &NonsmoothFn, x: &MatPoint, t: f64, points: usize, nonneg: bool) -> GridMin {
    let xs = [x[(0, 0)], x[(1, 0)], x[(2, 0)]];
    let xnorm = (xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2]).sqrt();

    // Lower bound on t*h over the sphere, subtracted from the cap budget.
    let h_floor = match h {
        NonsmoothFn::L1Oblique { lambda, .. } => t * lambda,
        _ => 0.0,
    };

    let rot = if xnorm > 1e-12 {
        reflection_to([xs[0] / xnorm, xs[1] / xnorm, xs[2] / xnorm])
    } else {
        reflection_to([0.0, 0.0, 1.0])
    };

    let eval = |u: [f64; 3]| -> f64 {
        let dist2 =
            (u[0] - xs[0]).powi(2) + (u[1] - xs[1]).powi(2) + (u[2] - xs[2]).powi(2);
        t * penalty_part(h, &u) + 0.5 * dist2
    };
    let feasible = |u: [f64; 3]| !nonneg || (u[0] >= 0.0 && u[1] >= 0.0 && u[2] >= 0.0);

    // Coarse pass: independent small lattice, plus the axis vertices, which
    // keeps the bound finite even when the orthant filter is active.
    let coarse_n = 20_000.min(points);
    let mut best = [0.0, 0.0, 1.0];
    let mut best_obj = f64::INFINITY;
    for i in 0..coarse_n {
        let p = lattice_point(i, coarse_n);
        let u = rotate(&rot, p);
        if feasible(u) {
            let obj = eval(u);
            if obj < best_obj {
                best_obj = obj;
                best = u;
            }
        }
    }
    for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        if feasible(v) {
            let obj = eval(v);
            if obj < best_obj {
                best_obj = obj;
                best = v;
            }
        }
    }

    // Any candidate with 1/2 ||u - x||^2 + t h_floor > B cannot beat the
    // coarse bound, which confines the search to a polar cap of the rotated
    // lattice: <x, u> >= c, i.e. a contiguous leading index range.
    let i_max = if xnorm > 1e-12 {
        let r2 = (2.0 * (best_obj - h_floor) + 1e-9).max(0.0);
        let c = (xnorm * xnorm + 1.0 - r2) / 2.0;
        let z_min = (c / xnorm).clamp(-1.0, 1.0);
        let cap = ((points as f64) * (1.0 - z_min) / 2.0).ceil() as usize;
        cap.min(points)
    } else {
        points
    };

    let (sin_g, cos_g) = GOLDEN_ANGLE.sin_cos();
    let mut cos_phi = 1.0;
    let mut sin_phi = 0.0;
    for i in 0..i_max {
        if i % ANCHOR_EVERY == 0 {
            let phi = (i as f64 * GOLDEN_ANGLE) % std::f64::consts::TAU;
            sin_phi = phi.sin();
            cos_phi = phi.cos();
        }
        let z = 1.0 - (2.0 * i as f64 + 1.0) / points as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let u = rotate(&rot, [r * cos_phi, r * sin_phi, z]);
        if feasible(u) {
            let obj = eval(u);
            if obj < best_obj {
                best_obj = obj;
                best = u;
            }
        }
        let next_cos = cos_phi * cos_g - sin_phi * sin_g;
        sin_phi = sin_phi * cos_g + cos_phi * sin_g;
        cos_phi = next_cos;
    }

    GridMin {
        point: MatPoint::from_column_slice(3, 1, &best),
        objective: best_obj,
    }
}

fn rotate(r: &[[f64; 3]; 3], p: [f64; 3]) -> [f64; 3] {
    [
        r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2],
        r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2],
        r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2],
    ]
}

fn line_sweep(h: &NonsmoothFn, x: f64, t: f64, step: f64, lo: f64, hi: f64) -> GridMin {
    let count = ((hi - lo) / step).ceil() as usize + 1;
    let mut best = lo;
    let mut best_obj = f64::INFINITY;
    for k in 0..count {
        let u = lo + k as f64 * step;
        let d = u - x;
        let obj = t * penalty_part(h, &[u]) + 0.5 * d * d;
        if obj < best_obj {
            best_obj = obj;
            best = u;
        }
    }
    GridMin {
        point: MatPoint::from_column_slice(1, 1, &[best]),
        objective: best_obj,
    }
}
