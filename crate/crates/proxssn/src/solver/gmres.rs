//! Matrix-free GMRES for the regularized Newton systems.
//!
//! The systems `(M + mu I) d = -F` are nonsymmetric, moderately sized, and
//! only available through operator application, which makes full-memory
//! GMRES (Arnoldi with Givens rotations, no restart) the right sledgehammer:
//! the iteration cap is small, so the basis never grows past `maxit`
//! matrices. Solutions are verified against the true residual before being
//! handed back.

use thiserror::Error;

use crate::point::MatPoint;

/// A direction accepted by the inner solver.
#[derive(Debug, Clone)]
pub struct KrylovOutcome {
    pub direction: MatPoint,
    /// Arnoldi iterations performed.
    pub iters: usize,
    /// True relative residual `||A d - rhs|| / ||rhs||` of the returned
    /// direction, recomputed outside the recurrence.
    pub rel_residual: f64,
}

#[derive(Debug, Error)]
pub enum KrylovError {
    /// The iteration cap passed without reaching the requested residual.
    #[error("Krylov solve stalled after {iters} iterations at relative residual {rel_residual:.3e}")]
    Stagnation { iters: usize, rel_residual: f64 },
}

/// Solves `A d = rhs` where `apply` computes `A d`, stopping when the
/// relative residual drops to `tol_rel`. Points are treated as vectors
/// under the Frobenius inner product.
pub fn gmres<F>(
    apply: F,
    rhs: &MatPoint,
    tol_rel: f64,
    maxit: usize,
) -> Result<KrylovOutcome, KrylovError>
where
    F: Fn(&MatPoint) -> MatPoint,
{
    let beta = rhs.norm();
    if beta == 0.0 {
        return Ok(KrylovOutcome {
            direction: MatPoint::zeros(rhs.nrows(), rhs.ncols()),
            iters: 0,
            rel_residual: 0.0,
        });
    }
    let dim = rhs.nrows() * rhs.ncols();
    let m = maxit.max(1).min(dim);
    let tol_abs = tol_rel * beta;

    // Arnoldi basis and the Hessenberg matrix kept in rotated
    // (upper-triangular) form; `g` is the rotated residual vector.
    let mut basis: Vec<MatPoint> = vec![rhs / beta];
    let mut h_cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut cs: Vec<f64> = Vec::with_capacity(m);
    let mut sn: Vec<f64> = Vec::with_capacity(m);
    let mut g = vec![0.0; m + 1];
    g[0] = beta;

    let mut used = 0;
    for j in 0..m {
        let mut w = apply(&basis[j]);
        let w_scale = w.norm();
        let mut col = vec![0.0; j + 2];
        // Modified Gram-Schmidt.
        for (i, v) in basis.iter().enumerate() {
            let hij = w.dot(v);
            col[i] = hij;
            w -= v * hij;
        }
        let h_next = w.norm();
        col[j + 1] = h_next;
        used = j + 1;

        // Rotate the new column by the accumulated Givens rotations.
        for i in 0..j {
            let (c, s) = (cs[i], sn[i]);
            let tmp = c * col[i] + s * col[i + 1];
            col[i + 1] = -s * col[i] + c * col[i + 1];
            col[i] = tmp;
        }
        let (c, s) = givens(col[j], col[j + 1]);
        cs.push(c);
        sn.push(s);
        col[j] = c * col[j] + s * col[j + 1];
        col[j + 1] = 0.0;
        g[j + 1] = -s * g[j];
        g[j] *= c;
        h_cols.push(col);

        let happy = h_next <= 1e-14 * w_scale.max(1.0);
        if g[j + 1].abs() <= tol_abs || happy {
            break;
        }
        basis.push(w / h_next);
    }

    // Back-substitute through the rotated Hessenberg system.
    let k = used;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for (l, yl) in y.iter().enumerate().take(k).skip(i + 1) {
            acc -= h_cols[l][i] * yl;
        }
        let diag = h_cols[i][i];
        y[i] = if diag.abs() > 0.0 { acc / diag } else { 0.0 };
    }
    let mut direction = MatPoint::zeros(rhs.nrows(), rhs.ncols());
    for (i, yi) in y.iter().enumerate() {
        direction += &basis[i] * *yi;
    }

    let true_res = (apply(&direction) - rhs).norm();
    let rel_residual = true_res / beta;
    // Allow a whisker of slack over the recurrence-estimated target: the
    // two residuals drift apart only through roundoff.
    if rel_residual <= tol_rel * 1.05 + 1e-14 {
        Ok(KrylovOutcome {
            direction,
            iters: k,
            rel_residual,
        })
    } else {
        Err(KrylovError::Stagnation {
            iters: k,
            rel_residual,
        })
    }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if a == 0.0 {
        (0.0, 1.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{col_point, MatPoint};
    use crate::problems::rng::Rng;

    #[test]
    fn identity_plus_shift_is_a_one_step_solve() {
        // (I + 0.5 I) d = -F  =>  d = -F / 1.5.
        let rhs = col_point(&[-3.0, 1.5, 0.0]);
        let out = gmres(|d| d * 1.5, &rhs, 1e-12, 10).unwrap();
        assert!((out.direction - &rhs / 1.5).norm() < 1e-12);
        assert_eq!(out.iters, 1);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let rhs = MatPoint::zeros(4, 2);
        let out = gmres(|d| d.clone(), &rhs, 1e-10, 5).unwrap();
        assert_eq!(out.direction, rhs);
        assert_eq!(out.iters, 0);
    }

    #[test]
    fn matches_dense_lu_on_random_well_conditioned_system() {
        let n = 50;
        let mut rng = Rng::new(2718);
        let mut a = MatPoint::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = rng.normal() / (n as f64).sqrt();
            }
            a[(i, i)] += 3.0; // diagonally dominant, well-conditioned
        }
        let mut rhs = MatPoint::zeros(n, 1);
        for i in 0..n {
            rhs[(i, 0)] = rng.normal();
        }
        let out = gmres(|d| &a * d, &rhs, 1e-12, 100).unwrap();
        let direct = a.clone().lu().solve(&rhs).unwrap();
        assert!(
            (&out.direction - &direct).norm() <= 1e-8,
            "gap {}",
            (&out.direction - &direct).norm()
        );
    }

    #[test]
    fn singular_operator_with_shift_is_solvable() {
        // M projects onto the first coordinate (singular); mu = 0.3 shifts
        // every eigenvalue away from zero.
        let apply = |d: &MatPoint| {
            let mut out = d * 0.3;
            out[(0, 0)] += d[(0, 0)];
            out
        };
        let rhs = col_point(&[1.0, -2.0]);
        let out = gmres(apply, &rhs, 1e-12, 10).unwrap();
        assert!((out.direction[(0, 0)] - 1.0 / 1.3).abs() < 1e-12);
        assert!((out.direction[(1, 0)] + 2.0 / 0.3).abs() < 1e-11);
    }

    #[test]
    fn hopeless_cap_reports_stagnation() {
        // A shift matrix needs n iterations to see the whole space; cap at
        // far fewer and require an unreachable tolerance.
        let n = 30;
        let mut a = MatPoint::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = 1.0;
        }
        for i in 0..n {
            a[(i, i)] += 1e-6;
        }
        let mut rhs = MatPoint::zeros(n, 1);
        rhs[(n - 1, 0)] = 1.0;
        let res = gmres(|d| &a * d, &rhs, 1e-12, 3);
        assert!(matches!(res, Err(KrylovError::Stagnation { iters: 3, .. })));
    }

    #[test]
    fn matrix_shaped_unknowns_flatten_correctly() {
        let mut rng = Rng::new(99);
        let mut rhs = MatPoint::zeros(4, 3);
        for j in 0..3 {
            for i in 0..4 {
                rhs[(i, j)] = rng.normal();
            }
        }
        // Operator mixing the columns: out = 2 d + shift of columns.
        let apply = |d: &MatPoint| {
            let mut out = d * 2.0;
            for j in 1..3 {
                for i in 0..4 {
                    out[(i, j)] += 0.25 * d[(i, j - 1)];
                }
            }
            out
        };
        let out = gmres(apply, &rhs, 1e-12, 12).unwrap();
        assert!((apply(&out.direction) - &rhs).norm() < 1e-10);
    }
}
