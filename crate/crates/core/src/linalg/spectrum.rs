use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::eigenvalues;
use super::rank::{rank, rank_shifted, DEFAULT_RANK_TOL};
use super::SquareMatrix;
use crate::error::{Error, Result};

/// Default relative tolerance for identifying roots and classifying zeros.
pub const DEFAULT_ZERO_TOL: f64 = 1e-7;

/// Characteristic-polynomial coefficients (of the Frobenius-normalized matrix)
/// below this multiple of `binom(n, k)` count as vanishing.
const COEFF_TOL: f64 = 1e-11;

/// Safety factor on the `eps^(1/k)` spread of a perturbed k-fold eigenvalue.
const CLUSTER_SPREAD_FACTOR: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub eigenvalue: Complex64,
    pub alg_mult: usize,
    pub geom_mult: usize,
}

impl SpectralEntry {
    pub fn is_defective(&self) -> bool {
        self.geom_mult < self.alg_mult
    }
}

/// Eigenvalues with algebraic and geometric multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub dim: usize,
    /// Sorted by (real part, imaginary part).
    pub entries: Vec<SpectralEntry>,
    pub zero_tol: f64,
}

impl SpectralSummary {
    /// Eigenvalues repeated by algebraic multiplicity, in sorted order.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.alg_mult))
            .collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.eigenvalue.norm())
            .fold(0.0, f64::max)
    }

    /// True when every eigenvalue was classified as zero.
    pub fn is_nilpotent(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.eigenvalue == Complex64::new(0.0, 0.0))
    }

    pub fn entry_near(&self, value: Complex64, tol: f64) -> Option<&SpectralEntry> {
        self.entries
            .iter()
            .find(|e| (e.eigenvalue - value).norm() <= tol)
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.entries.iter().all(|e| !e.is_defective())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub zero_tol: f64,
    pub rank_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            zero_tol: DEFAULT_ZERO_TOL,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

fn ensure_finite(m: &SquareMatrix) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("matrix has non-finite entries"))
    }
}

/// Coefficients of `det(M - λ Id)` in ascending powers of `λ`, by the
/// Faddeev–LeVerrier recursion. The leading coefficient is `(-1)^n`.
pub fn char_poly(m: &SquareMatrix) -> Result<Vec<f64>> {
    ensure_finite(m)?;
    let n = m.dim();
    let s = m.frobenius_norm();
    if s == 0.0 {
        let mut c = vec![0.0; n + 1];
        c[n] = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        return Ok(c);
    }
    let b = m.scale(1.0 / s);
    let mut c = normalized_char_poly(&b);
    // undo the normalization: c_k(M) = c_k(B) s^(n-k)
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= s.powi((n - k) as i32);
    }
    Ok(c)
}

/// Faddeev–LeVerrier on `b`, returning `det(b - λ Id)` coefficients, ascending.
fn normalized_char_poly(b: &SquareMatrix) -> Vec<f64> {
    let n = b.dim();
    // monic det(λ Id - B) = Σ a_k λ^k, a_n = 1
    let mut a = vec![0.0; n + 1];
    a[n] = 1.0;
    let mut mk = SquareMatrix::zeros(n);
    for k in 1..=n {
        let mut next = b.mul(&mk);
        for i in 0..n {
            next.add_at(i, i, a[n - k + 1]);
        }
        mk = next;
        a[n - k] = -b.mul(&mk).trace() / k as f64;
    }
    if n % 2 == 1 {
        for v in &mut a {
            *v = -*v;
        }
    }
    a
}

/// `(Tr M, Tr M², …, Tr M^kmax)` by iterated multiplication.
pub fn power_traces(m: &SquareMatrix, kmax: usize) -> Result<Vec<f64>> {
    if kmax == 0 {
        return Err(Error::invalid("kmax must be at least 1"));
    }
    ensure_finite(m)?;
    let mut out = Vec::with_capacity(kmax);
    let mut p = m.clone();
    out.push(p.trace());
    for _ in 1..kmax {
        p = p.mul(m);
        out.push(p.trace());
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Largest spread a k-fold eigenvalue can show after a backward-stable
/// perturbation of relative size machine epsilon (Jordan block of size k).
fn perturbation_radius(k: usize, norm: f64) -> f64 {
    CLUSTER_SPREAD_FACTOR * f64::EPSILON.powf(1.0 / k as f64) * norm
}

struct Cluster {
    members: Vec<Complex64>,
}

impl Cluster {
    fn mean(&self) -> Complex64 {
        self.members.iter().sum::<Complex64>() / self.members.len() as f64
    }
}

/// Groups approximate roots into eigenvalue clusters.
///
/// Starting from the first unassigned root, the largest group of its nearest
/// neighbours is accepted whose spread around the group mean is within the
/// plain tolerance, or within the perturbation radius for that group size
/// while staying small (under a tenth) against the nearest outsider or the
/// origin.
fn cluster_roots(roots: &[Complex64], abs_tol: f64, norm: f64) -> Vec<Cluster> {
    let mut remaining: Vec<Complex64> = roots.to_vec();
    let mut clusters = Vec::new();
    while let Some(&seed) = remaining.first() {
        let mut order: Vec<usize> = (0..remaining.len()).collect();
        order.sort_by(|&a, &b| {
            (remaining[a] - seed)
                .norm()
                .total_cmp(&(remaining[b] - seed).norm())
        });
        let mut take = 1;
        for k in (2..=remaining.len()).rev() {
            let members: Vec<Complex64> = order[..k].iter().map(|&i| remaining[i]).collect();
            let mean = members.iter().sum::<Complex64>() / k as f64;
            let spread = members
                .iter()
                .map(|r| (r - mean).norm())
                .fold(0.0, f64::max);
            if spread <= abs_tol {
                take = k;
                break;
            }
            if spread <= perturbation_radius(k, norm) {
                // zero eigenvalues are classified beforehand, so the origin
                // always counts as a neighbour
                let gap = order[k..]
                    .iter()
                    .map(|&i| (remaining[i] - mean).norm())
                    .fold(mean.norm(), f64::min);
                if spread < 0.1 * gap {
                    take = k;
                    break;
                }
            }
        }
        let mut chosen: Vec<usize> = order[..take].to_vec();
        chosen.sort_unstable_by(|a, b| b.cmp(a));
        let members = chosen.into_iter().map(|i| remaining.remove(i)).collect();
        clusters.push(Cluster { members });
    }
    clusters
}

/// Spectrum with multiplicities using `zero_tol` and the default rank tolerance.
pub fn spectral_summary(m: &SquareMatrix, zero_tol: f64) -> Result<SpectralSummary> {
    spectral_summary_with(
        m,
        &SpectralOptions {
            zero_tol,
            ..SpectralOptions::default()
        },
    )
}

pub fn spectral_summary_with(m: &SquareMatrix, opts: &SpectralOptions) -> Result<SpectralSummary> {
    let zero_tol = opts.zero_tol;
    if !(0.0..1.0).contains(&zero_tol) {
        return Err(Error::invalid("zero tolerance must lie in [0, 1)"));
    }
    ensure_finite(m)?;
    let n = m.dim();
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Ok(SpectralSummary {
            dim: n,
            entries: vec![SpectralEntry {
                eigenvalue: Complex64::new(0.0, 0.0),
                alg_mult: n,
                geom_mult: n,
            }],
            zero_tol,
        });
    }

    let b = m.scale(1.0 / norm);
    let mut roots: Vec<Complex64> = match eigenvalues(&b) {
        Ok(r) => r.into_iter().map(|z| z * norm).collect(),
        Err(Error::NumericalFailure { message, partial }) => {
            return Err(Error::NumericalFailure {
                message,
                partial: partial.into_iter().map(|z| z * norm).collect(),
            })
        }
        Err(e) => return Err(e),
    };
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));

    // Zero multiplicity from the vanishing low-order coefficients. The
    // coefficients are polynomial in the entries, so they stay accurate for
    // nilpotent blocks whose roots scatter like eps^(1/k).
    let coeffs = normalized_char_poly(&b);
    let mut zeros = (0..n)
        .take_while(|&k| coeffs[k].abs() <= COEFF_TOL * binomial(n, k))
        .count();
    // never zero a root the QR iteration places clearly away from the origin
    while zeros > 0
        && roots[zeros - 1].norm() > perturbation_radius(zeros, norm).max(zero_tol * norm)
    {
        zeros -= 1;
    }
    let radius = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    while zeros < n && roots[zeros].norm() <= zero_tol * radius {
        zeros += 1;
    }

    let abs_tol = zero_tol * (1.0 + radius);
    let mut values: Vec<(Complex64, usize)> = Vec::new();
    if zeros > 0 {
        values.push((Complex64::new(0.0, 0.0), zeros));
    }
    for c in cluster_roots(&roots[zeros..], abs_tol, norm) {
        let k = c.members.len();
        let mut mean = c.mean();
        let snap = abs_tol.max(perturbation_radius(k, norm));
        if mean.im.abs() <= snap {
            mean.im = 0.0;
        }
        if mean.norm() <= zero_tol * radius {
            if let Some(z) = values.iter_mut().find(|(v, _)| v.norm() == 0.0) {
                z.1 += k;
            } else {
                values.push((Complex64::new(0.0, 0.0), k));
            }
            continue;
        }
        values.push((mean, k));
    }
    values.sort_by(|a, b| cmp_complex(&a.0, &b.0));

    let mut entries = Vec::with_capacity(values.len());
    for (eigenvalue, alg_mult) in values {
        let r = if eigenvalue.norm() == 0.0 {
            rank(m, opts.rank_tol)?
        } else {
            rank_shifted(m, eigenvalue, opts.rank_tol)?
        };
        let geom_mult = (n - r.min(n)).clamp(1, alg_mult);
        entries.push(SpectralEntry {
            eigenvalue,
            alg_mult,
            geom_mult,
        });
    }
    Ok(SpectralSummary {
        dim: n,
        entries,
        zero_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_char_poly() {
        let c = char_poly(&SquareMatrix::identity(2)).unwrap();
        assert!(approx(&c, &[1.0, -2.0, 1.0], 1e-14));
    }

    #[test]
    fn zero_matrix_char_poly_is_monomial() {
        let c = char_poly(&SquareMatrix::zeros(2)).unwrap();
        assert_eq!(c, vec![0.0, 0.0, 1.0]);
        let c = char_poly(&SquareMatrix::zeros(3)).unwrap();
        assert_eq!(c, vec![0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn char_poly_rejects_nan() {
        let mut m = SquareMatrix::identity(2);
        m.set(0, 1, f64::NAN);
        assert!(matches!(char_poly(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn zero_matrix_summary() {
        let s = spectral_summary(&SquareMatrix::zeros(3), DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0].alg_mult, 3);
        assert_eq!(s.entries[0].geom_mult, 3);
        assert!(s.is_nilpotent());
    }

    #[test]
    fn jordan_block_is_defective() {
        let m = SquareMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ])
        .unwrap();
        let s = spectral_summary(&m, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(s.entries.len(), 2);
        assert_eq!((s.entries[0].alg_mult, s.entries[0].geom_mult), (2, 1));
        assert!((s.entries[0].eigenvalue.re - 2.0).abs() < 1e-12);
        assert_eq!((s.entries[1].alg_mult, s.entries[1].geom_mult), (1, 1));
    }

    #[test]
    fn nilpotent_block_of_size_four() {
        let m = SquareMatrix::from_fn(4, |r, c| if c == r + 1 { 3.0 } else { 0.0 });
        let s = spectral_summary(&m, DEFAULT_ZERO_TOL).unwrap();
        assert!(s.is_nilpotent());
        assert_eq!((s.entries[0].alg_mult, s.entries[0].geom_mult), (4, 1));
    }

    #[test]
    fn power_traces_identity_and_nilpotent() {
        assert_eq!(
            power_traces(&SquareMatrix::identity(5), 3).unwrap(),
            vec![5.0, 5.0, 5.0]
        );
        let m = SquareMatrix::from_fn(4, |r, c| if c > r { 1.0 + (r + c) as f64 } else { 0.0 });
        assert!(power_traces(&m, 4).unwrap().iter().all(|&t| t == 0.0));
        assert!(power_traces(&m, 0).is_err());
    }

    #[test]
    fn rejects_bad_zero_tol() {
        assert!(spectral_summary(&SquareMatrix::identity(2), 1.0).is_err());
        assert!(spectral_summary(&SquareMatrix::identity(2), -0.1).is_err());
    }
}
