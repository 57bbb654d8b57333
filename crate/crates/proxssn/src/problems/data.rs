//! Deterministic Gaussian test matrices and the SVD-based starting point.
//!
//! Data matrices are drawn entrywise from the standard normal
//! distribution (column-major fill order), column-centered, and scaled by
//! the spectral norm, so `||A||_2 = 1` afterwards. All randomness flows
//! through [`Rng`](super::rng::Rng), making every instance reproducible
//! from its `u64` seed alone.

use thiserror::Error;

use super::rng::Rng;
use crate::point::MatPoint;

#[derive(Debug, Error)]
pub enum DataError {
    /// The requested number of leading singular vectors exceeds the
    /// numerical rank of the matrix.
    #[error("singular value {index} is numerically zero ({sigma:.3e})")]
    RankDeficient { index: usize, sigma: f64 },
}

/// Fills an `m x n` matrix with standard normal draws in column-major
/// order.
pub fn gaussian_matrix(m: usize, n: usize, rng: &mut Rng) -> MatPoint {
    let mut a = MatPoint::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            a[(i, j)] = rng.normal();
        }
    }
    a
}

/// Subtracts each column's mean in place.
pub fn center_columns(a: &mut MatPoint) {
    let m = a.nrows();
    for j in 0..a.ncols() {
        let mean = a.column(j).sum() / m as f64;
        for i in 0..m {
            a[(i, j)] -= mean;
        }
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &MatPoint) -> f64 {
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
}

/// Draws a seeded Gaussian matrix, centers its columns, and normalizes it
/// by its spectral norm.
pub fn generate_gaussian_data(m: usize, n: usize, seed: u64) -> MatPoint {
    assert!(m >= 1 && n >= 1, "data matrix needs positive dimensions");
    let mut rng = Rng::new(seed);
    let mut a = gaussian_matrix(m, n, &mut rng);
    center_columns(&mut a);
    let sigma = spectral_norm(&a);
    if sigma > 0.0 {
        a /= sigma;
    }
    a
}

/// Singular values of `a` sorted in descending order, ties broken by the
/// original index so the order is deterministic.
fn sorted_singular_indices(sv: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&i, &j| {
        sv[j]
            .partial_cmp(&sv[i])
            .expect("singular values are finite")
            .then(i.cmp(&j))
    });
    idx
}

/// `p x p` diagonal matrix of the squared leading `p` singular values of
/// `a`, in descending order.
pub fn leading_d2(a: &MatPoint, p: usize) -> MatPoint {
    assert!(p <= a.nrows().min(a.ncols()), "p exceeds min(m, n)");
    let svd = a.clone().svd(false, false);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let order = sorted_singular_indices(&sv);
    let mut d2 = MatPoint::zeros(p, p);
    for (k, &i) in order.iter().take(p).enumerate() {
        d2[(k, k)] = sv[i] * sv[i];
    }
    d2
}

/// The leading `p` right singular vectors of `a` as an `n x p` matrix,
/// ordered by decreasing singular value. Column signs are canonicalized
/// (largest-magnitude entry made positive) so the result does not depend
/// on the SVD routine's sign conventions.
pub fn initial_point_svd(a: &MatPoint, p: usize) -> Result<MatPoint, DataError> {
    let n = a.ncols();
    assert!(p <= a.nrows().min(n), "p exceeds min(m, n)");
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let order = sorted_singular_indices(&sv);
    let rank_tol = sv[order[0]] * f64::EPSILON * a.nrows().max(n) as f64;
    let mut x0 = MatPoint::zeros(n, p);
    for (k, &i) in order.iter().take(p).enumerate() {
        if sv[i] <= rank_tol {
            return Err(DataError::RankDeficient {
                index: k,
                sigma: sv[i],
            });
        }
        let mut col: Vec<f64> = (0..n).map(|r| v_t[(i, r)]).collect();
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut lead = 0;
        for (r, v) in col.iter().enumerate() {
            if v.abs() > col[lead].abs() {
                lead = r;
            }
        }
        let sign = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        for (r, v) in col.iter_mut().enumerate() {
            x0[(r, k)] = sign * *v / norm;
        }
    }
    Ok(x0)
}
