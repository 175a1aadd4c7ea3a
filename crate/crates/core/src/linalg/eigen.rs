//! Dense eigenvalue kernels: balancing, Householder reduction to upper
//! Hessenberg form, and the real double-shift (Francis) QR iteration.

use num_complex::Complex64;

use super::SquareMatrix;
use crate::error::{Error, Result};

const RADIX: f64 = 2.0;

/// Shifts per dimension the QR iteration may spend on one eigenvalue before
/// giving up; the budget is this times `max(10, n)`. Clusters of repeated
/// eigenvalues in non-normal blocks converge only linearly.
pub const QR_ITERATION_BUDGET: usize = 30;

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable. Eigenvalues are unchanged; roundoff in QR drops.
pub fn balance(a: &mut [f64], n: usize) {
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= g;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// In-place orthogonal similarity to upper Hessenberg form.
pub fn hessenberg(a: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let norm = (0..len)
            .map(|i| a[(k + 1 + i) * n + k].powi(2))
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        for i in 0..len {
            v[i] = a[(k + 1 + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm = v[..len].iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for x in v[..len].iter_mut() {
            *x /= vnorm;
        }
        // A <- H A
        for j in 0..n {
            let s: f64 = (0..len).map(|i| v[i] * a[(k + 1 + i) * n + j]).sum();
            for i in 0..len {
                a[(k + 1 + i) * n + j] -= 2.0 * v[i] * s;
            }
        }
        // A <- A H
        for i in 0..n {
            let s: f64 = (0..len).map(|j| a[i * n + k + 1 + j] * v[j]).sum();
            for j in 0..len {
                a[i * n + k + 1 + j] -= 2.0 * s * v[j];
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the real double-shift QR
/// algorithm with deflation. `h` is destroyed.
pub fn hqr(h: &mut [f64], n: usize) -> Result<Vec<Complex64>> {
    // 1-based accessors keep the index arithmetic of the classical algorithm readable.
    macro_rules! a {
        ($i:expr, $j:expr) => {
            h[($i - 1) * n + ($j - 1)]
        };
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a!(i, j).abs();
        }
    }

    let budget = QR_ITERATION_BUDGET * n.max(10);
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a!(l - 1, l - 1).abs() + a!(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                let sub = a!(l, l - 1).abs();
                if sub + s == s {
                    a!(l, l - 1) = 0.0;
                    break;
                }
                // Ahues–Tisseur test: the product of the off-diagonal pair is
                // negligible against the gap of the diagonal pair. Without it
                // the iteration can stall near clusters of equal eigenvalues.
                let sup = a!(l - 1, l).abs();
                let (ab, ba) = (sub.max(sup), sub.min(sup));
                let d = (a!(l - 1, l - 1) - a!(l, l)).abs();
                let (aa, bb) = (a!(l, l).abs().max(d), a!(l, l).abs().min(d));
                let s2 = aa + ab;
                if ba * (ab / s2) <= f64::MIN_POSITIVE.max(f64::EPSILON * (bb * (aa / s2))) {
                    a!(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a!(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = a!(nn - 1, nn - 1);
                let mut w = a!(nn, nn - 1) * a!(nn - 1, nn);
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == budget {
                        let partial = (nn + 1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect();
                        return Err(Error::NumericalFailure {
                            message: format!(
                                "QR iteration did not converge within {budget} shifts"
                            ),
                            partial,
                        });
                    }
                    if its > 0 && its.is_multiple_of(10) {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a!(i, i) -= x;
                        }
                        let s = a!(nn, nn - 1).abs() + a!(nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;

                    let (mut p, mut q, mut r, mut z);
                    let mut m = nn - 2;
                    loop {
                        z = a!(m, m);
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a!(m + 1, m) + a!(m, m + 1);
                        q = a!(m + 1, m + 1) - z - r - s;
                        r = a!(m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a!(m, m - 1).abs() * (q.abs() + r.abs());
                        let v =
                            p.abs() * (a!(m - 1, m - 1).abs() + z.abs() + a!(m + 1, m + 1).abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a!(i, i - 2) = 0.0;
                        if i != m + 2 {
                            a!(i, i - 3) = 0.0;
                        }
                    }
                    for k in m..nn {
                        if k != m {
                            p = a!(k, k - 1);
                            q = a!(k + 1, k - 1);
                            r = 0.0;
                            if k != nn - 1 {
                                r = a!(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a!(k, k - 1) = -a!(k, k - 1);
                                }
                            } else {
                                a!(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a!(k, j) + q * a!(k + 1, j);
                                if k != nn - 1 {
                                    p += r * a!(k + 2, j);
                                    a!(k + 2, j) -= p * z;
                                }
                                a!(k + 1, j) -= p * y;
                                a!(k, j) -= p * x;
                            }
                            let mmin = nn.min(k + 3);
                            for i in l..=mmin {
                                p = x * a!(i, k) + y * a!(i, k + 1);
                                if k != nn - 1 {
                                    p += z * a!(i, k + 2);
                                    a!(i, k + 2) -= p * r;
                                }
                                a!(i, k + 1) -= p * q;
                                a!(i, k) -= p;
                            }
                        }
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// All eigenvalues of a real square matrix (balanced Hessenberg QR).
pub fn eigenvalues(m: &SquareMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    balance(&mut a, n);
    hessenberg(&mut a, n);
    hqr(&mut a, n)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(m: &SquareMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    for sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        let scale: f64 = a.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale || sweep == 99 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// LU factorization with partial pivoting; returns `(inverse, determinant)`.
/// `None` when a pivot is exactly zero.
pub fn invert(m: &SquareMatrix) -> Option<(SquareMatrix, f64)> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut inv = SquareMatrix::identity(n).as_slice().to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
                inv.swap(piv * n + j, col * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for j in 0..n {
            a[col * n + j] /= d;
            inv[col * n + j] /= d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[i * n + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[i * n + j] -= f * a[col * n + j];
                inv[i * n + j] -= f * inv[col * n + j];
            }
        }
    }
    Some((SquareMatrix::new(n, inv).ok()?, det))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let m = SquareMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn triangular_eigenvalues_are_diagonal() {
        let m = SquareMatrix::from_rows(&[
            vec![3.0, 1.0, 4.0, 1.0],
            vec![0.0, -2.0, 5.0, 9.0],
            vec![0.0, 0.0, 0.5, 2.0],
            vec![0.0, 0.0, 0.0, 7.0],
        ])
        .unwrap();
        let ev = sorted(eigenvalues(&m).unwrap());
        for (got, want) in ev.iter().zip([-2.0, 0.5, 3.0, 7.0]) {
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_jacobi_matches_known() {
        let m = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = symmetric_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_and_determinant() {
        let m = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let (inv, det) = invert(&m).unwrap();
        assert!((det + 1.0).abs() < 1e-15);
        let prod = m.mul(&inv);
        assert!(prod.sub(&SquareMatrix::identity(2)).max_abs() < 1e-15);
        assert!(invert(&SquareMatrix::zeros(2)).is_none());
    }
}
