use num_complex::Complex64;

use super::SquareMatrix;
use crate::error::{Error, Result};

/// Default relative threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Absolute values of the diagonal of `R` from a column-pivoted Householder
/// QR of a general `rows x cols` row-major matrix. Non-increasing up to roundoff.
pub(crate) fn pivoted_r_diagonal(mut a: Vec<f64>, rows: usize, cols: usize) -> Vec<f64> {
    let steps = rows.min(cols);
    let mut norms: Vec<f64> = (0..cols)
        .map(|c| (0..rows).map(|r| a[r * cols + c].powi(2)).sum())
        .collect();
    let mut diag = Vec::with_capacity(steps);
    for k in 0..steps {
        let piv = (k..cols)
            .max_by(|&i, &j| norms[i].total_cmp(&norms[j]))
            .unwrap();
        if piv != k {
            for r in 0..rows {
                a.swap(r * cols + k, r * cols + piv);
            }
            norms.swap(k, piv);
        }
        let norm = (k..rows)
            .map(|r| a[r * cols + k].powi(2))
            .sum::<f64>()
            .sqrt();
        diag.push(norm);
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k * cols + k] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|r| a[r * cols + k]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            for x in &mut v {
                *x /= vnorm;
            }
            for c in k..cols {
                let s: f64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, vi)| vi * a[(k + i) * cols + c])
                    .sum();
                for (i, vi) in v.iter().enumerate() {
                    a[(k + i) * cols + c] -= 2.0 * vi * s;
                }
            }
        }
        // Downdate remaining column norms from scratch; sizes here are tiny.
        for c in k + 1..cols {
            norms[c] = (k + 1..rows).map(|r| a[r * cols + c].powi(2)).sum();
        }
    }
    diag
}

/// Numerical rank: number of `R` diagonal entries above `tol` times the largest.
pub fn rank(m: &SquareMatrix, tol: f64) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("rank tolerance must be positive"));
    }
    if !m.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let n = m.dim();
    let diag = pivoted_r_diagonal(m.as_slice().to_vec(), n, n);
    Ok(count_above(&diag, tol))
}

fn count_above(diag: &[f64], tol: f64) -> usize {
    let top = diag.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    diag.iter().filter(|&&d| d > tol * top).count()
}

/// Complex rank of `m - shift * Id` for a real matrix and complex shift, via
/// the real 2n x 2n representation `[[A - a, b], [-b, A - a]]` whose rank is
/// twice the complex rank.
pub fn rank_shifted(m: &SquareMatrix, shift: Complex64, tol: f64) -> Result<usize> {
    if shift.im == 0.0 {
        return rank(&m.shifted(shift.re), tol);
    }
    let n = m.dim();
    let big = 2 * n;
    let mut a = vec![0.0; big * big];
    for r in 0..n {
        for c in 0..n {
            let v = m.get(r, c) - if r == c { shift.re } else { 0.0 };
            a[r * big + c] = v;
            a[(r + n) * big + c + n] = v;
        }
        a[r * big + r + n] = shift.im;
        a[(r + n) * big + r] = -shift.im;
    }
    let diag = pivoted_r_diagonal(a, big, big);
    Ok(count_above(&diag, tol) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero() {
        assert_eq!(
            rank(&SquareMatrix::identity(4), DEFAULT_RANK_TOL).unwrap(),
            4
        );
        assert_eq!(rank(&SquareMatrix::zeros(3), DEFAULT_RANK_TOL).unwrap(), 0);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [1.0, -2.0, 3.0];
        let v = [0.5, 4.0, -1.0];
        let m = SquareMatrix::from_fn(3, |r, c| u[r] * v[c]);
        assert_eq!(rank(&m, DEFAULT_RANK_TOL).unwrap(), 1);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(rank(&SquareMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn complex_shift_rank() {
        // rotation generator: eigenvalues ±i, each simple
        let m = SquareMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(rank_shifted(&m, Complex64::new(0.0, 1.0), 1e-9).unwrap(), 1);
        assert_eq!(rank_shifted(&m, Complex64::new(0.0, 2.0), 1e-9).unwrap(), 2);
    }
}
