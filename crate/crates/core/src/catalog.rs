//! Constructors for the named example models, connections and metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connection::AffineConnection;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::metric::{PseudoMetric, SymmetricTwoTensor};
use crate::model::AffineCurvatureModel;
use crate::poly::{Polynomial, RationalFunction};

/// Exponent vectors of all monomials of total degree `<= degree` in the first
/// `k` of `n` variables, in graded lexicographic order.
fn monomials(n: usize, k: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(pos: usize, k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == k {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(pos + 1, k, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    rec(0, k, degree, &mut cur, &mut out);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    out
}

/// Random polynomial in the first `k` of `n` variables, coefficients uniform in `[-1, 1]`.
fn random_polynomial(rng: &mut ChaCha8Rng, n: usize, k: usize, degree: u32) -> Polynomial {
    monomials(n, k, degree)
        .into_iter()
        .fold(Polynomial::zero(n), |p, e| {
            p.add(&Polynomial::monomial(rng.gen_range(-1.0..=1.0), e))
        })
}

/// Random torsion-free connection with `Γ_{ij}^k` supported on `k > max(i, j)`
/// and depending only on `x_1 .. x_{k-1}`; every such connection is affine
/// Osserman. Coefficients are seeded and uniform in `[-1, 1]`.
pub fn build_nilpotent_connection(
    m: usize,
    degree_bound: u32,
    seed: u64,
) -> Result<AffineConnection> {
    if m < 2 {
        return Err(Error::UnsupportedDimension(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = AffineConnection::flat(m);
    for i in 0..m {
        for j in i..m {
            for k in j + 1..m {
                c.set_symmetric(i, j, k, random_polynomial(&mut rng, m, k, degree_bound));
            }
        }
    }
    Ok(c)
}

/// Model `𝔐_ε`: `A_{ijj}^i = 1` for `i ≠ j`, `A_{122}^2 = A_{121}^1 = −ε`,
/// completed by antisymmetry.
pub fn build_m_eps_model(m: usize, eps: f64) -> Result<AffineCurvatureModel> {
    if m < 2 {
        return Err(Error::UnsupportedDimension(m));
    }
    let mut a = AffineCurvatureModel::zeros(m);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                a.set_antisymmetric(i, j, j, i, 1.0);
            }
        }
    }
    a.set_antisymmetric(0, 1, 1, 1, -eps);
    a.set_antisymmetric(0, 1, 0, 0, -eps);
    Ok(a)
}

/// Connection realizing `𝔐_ε` for `m >= 3`: `Γ_{mm}^m = 2`,
/// `Γ_{im}^i = Γ_{mi}^i = Γ_{ii}^m = 1` for `i < m`, and
/// `Γ_{11}^1 = −Γ_{22}^2 = ε (x_1 + x_2)`.
pub fn build_m_eps_connection(m: usize, eps: f64) -> Result<AffineConnection> {
    if m < 3 {
        return Err(Error::UnsupportedDimension(m));
    }
    let last = m - 1;
    let mut c = AffineConnection::flat(m);
    c.set_symmetric(last, last, last, Polynomial::constant(m, 2.0));
    for i in 0..last {
        c.set_symmetric(i, last, i, Polynomial::constant(m, 1.0));
        c.set_symmetric(i, i, last, Polynomial::constant(m, 1.0));
    }
    let s = Polynomial::var(m, 0).add(&Polynomial::var(m, 1)).scale(eps);
    c.set_symmetric(0, 0, 0, s.clone());
    c.set_symmetric(1, 1, 1, s.scale(-1.0));
    Ok(c)
}

fn model_from_fn(m: usize, f: impl Fn(&[f64], &[f64], &[f64]) -> Vec<f64>) -> AffineCurvatureModel {
    let e = |i: usize| {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        v
    };
    let mut a = AffineCurvatureModel::zeros(m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let out = f(&e(i), &e(j), &e(k));
                for (l, v) in out.into_iter().enumerate() {
                    a.set(i, j, k, l, v);
                }
            }
        }
    }
    a
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `A_0(x, y) z = (y, z) x − (x, z) y`
fn constant_curvature_term(x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let (yz, xz) = (dot(y, z), dot(x, z));
    x.iter().zip(y).map(|(a, b)| yz * a - xz * b).collect()
}

/// `A_J(x, y) z = (Jy, z) Jx − (Jx, z) Jy − 2 (Jx, y) Jz`
fn complex_term(j: &SquareMatrix, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let (jx, jy, jz) = (j.mul_vec(x), j.mul_vec(y), j.mul_vec(z));
    let (a, b, c) = (dot(&jy, z), dot(&jx, z), dot(&jx, y));
    (0..x.len())
        .map(|l| a * jx[l] - b * jy[l] - 2.0 * c * jz[l])
        .collect()
}

/// `ℰ(x, y) z = −(x¹y² − x²y¹)(z¹e₁ + z²e₂)`, plus the same on `e₃, e₄` when `both_planes`.
fn perturbation_term(x: &[f64], y: &[f64], z: &[f64], both_planes: bool) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let planes: &[(usize, usize)] = if both_planes {
        &[(0, 1), (2, 3)]
    } else {
        &[(0, 1)]
    };
    for &(p, q) in planes {
        let w = x[p] * y[q] - x[q] * y[p];
        out[p] -= w * z[p];
        out[q] -= w * z[q];
    }
    out
}

/// Standard complex structure: `J e_{2j-1} = e_{2j}`, `J e_{2j} = −e_{2j-1}`.
pub fn complex_structure(m_bar: usize) -> SquareMatrix {
    let m = 2 * m_bar;
    let mut j = SquareMatrix::zeros(m);
    for b in 0..m_bar {
        j.set(2 * b + 1, 2 * b, 1.0);
        j.set(2 * b, 2 * b + 1, -1.0);
    }
    j
}

/// `λ₀ A_0 + λ₁ A_J + ε ℰ` in dimension `2 m̄`.
pub fn build_complex_model(
    m_bar: usize,
    lambda0: f64,
    lambda1: f64,
    eps: f64,
) -> Result<AffineCurvatureModel> {
    if m_bar < 2 {
        return Err(Error::UnsupportedDimension(2 * m_bar));
    }
    let j = complex_structure(m_bar);
    Ok(model_from_fn(2 * m_bar, |x, y, z| {
        let a0 = constant_curvature_term(x, y, z);
        let aj = complex_term(&j, x, y, z);
        let e = perturbation_term(x, y, z, false);
        (0..x.len())
            .map(|l| lambda0 * a0[l] + lambda1 * aj[l] + eps * e[l])
            .collect()
    }))
}

/// Three anticommuting complex structures on `ℝ^{4k} = ℍ^k`, given by left
/// multiplication by the quaternion units `i, j, k`. Each quaternion factor
/// uses the real basis `(1, i, k, j)`: then `J₁e₁ = e₂`, and the planes
/// `(e₁, e₂)` and `(e₃, e₄)` carrying the perturbation `ℰ` are oriented complex
/// lines of right multiplication by `i`, which commutes with every `J_a`.
/// With the order `(1, i, j, k)` the perturbed model is not projective
/// Osserman once `λ₁, λ₂, λ₃` differ.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionFrame {
    pub k: usize,
    pub j1: SquareMatrix,
    pub j2: SquareMatrix,
    pub j3: SquareMatrix,
}

impl QuaternionFrame {
    /// 4x4 blocks of left multiplication, `column c = image of basis vector c`.
    const LEFT_I: [[i8; 4]; 4] = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]];
    const LEFT_J: [[i8; 4]; 4] = [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]];
    const LEFT_K: [[i8; 4]; 4] = [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]];

    pub fn new(k: usize) -> Self {
        let block = |b: &[[i8; 4]; 4]| {
            SquareMatrix::from_fn(4 * k, |r, c| {
                if r / 4 == c / 4 {
                    b[r % 4][c % 4] as f64
                } else {
                    0.0
                }
            })
        };
        QuaternionFrame {
            k,
            j1: block(&Self::LEFT_I),
            j2: block(&Self::LEFT_J),
            j3: block(&Self::LEFT_K),
        }
    }

    pub fn structures(&self) -> [&SquareMatrix; 3] {
        [&self.j1, &self.j2, &self.j3]
    }
}

/// `λ₀ A_0 + Σ λ_i A_{J_i} + ε ℰ` in dimension `4k`, with `ℰ` acting on the
/// planes `(e₁, e₂)` and `(e₃, e₄)`.
pub fn build_quaternion_model(
    k: usize,
    lambda: [f64; 4],
    eps: f64,
) -> Result<AffineCurvatureModel> {
    if k < 2 {
        return Err(Error::UnsupportedDimension(4 * k));
    }
    let frame = QuaternionFrame::new(k);
    Ok(model_from_fn(4 * k, |x, y, z| {
        let mut out: Vec<f64> = constant_curvature_term(x, y, z)
            .iter()
            .map(|v| lambda[0] * v)
            .collect();
        for (li, j) in lambda[1..].iter().zip(frame.structures()) {
            for (o, v) in out.iter_mut().zip(complex_term(j, x, y, z)) {
                *o += li * v;
            }
        }
        for (o, v) in out.iter_mut().zip(perturbation_term(x, y, z, true)) {
            *o += eps * v;
        }
        out
    }))
}

/// `ℝ^p × S^q`: `−δ` on the first `p` coordinates and the stereographic round
/// metric `4 (1 + |u|²)^{-2} δ` on the last `q`. Signature `(p, q)`.
pub fn build_product_sphere_metric(p: usize, q: usize) -> Result<PseudoMetric> {
    if p < 1 || q < 2 {
        return Err(Error::invalid(format!(
            "product metric needs p >= 1 and q >= 2, got p = {p}, q = {q}"
        )));
    }
    let n = p + q;
    let one_plus_u2 = (p..n).fold(Polynomial::constant(n, 1.0), |acc, i| {
        acc.add(&Polynomial::var(n, i).mul(&Polynomial::var(n, i)))
    });
    let denominator = one_plus_u2.mul(&one_plus_u2);
    let g = (0..n * n)
        .map(|s| {
            let (i, j) = (s / n, s % n);
            if i != j {
                RationalFunction::polynomial(Polynomial::zero(n))
            } else if i < p {
                RationalFunction::polynomial(Polynomial::constant(n, -1.0))
            } else {
                RationalFunction {
                    numerator: Polynomial::constant(n, 4.0),
                    denominator: Some(denominator.clone()),
                }
            }
        })
        .collect();
    PseudoMetric::new(n, g, p, q)
}

/// Closed-form curvature of the product metric: zero on the flat factor and
/// `R(x, y) z = g(y, z) x − g(x, z) y` on the unit-sphere factor.
pub fn product_sphere_curvature(p: usize, q: usize, point: &[f64]) -> Result<AffineCurvatureModel> {
    let n = p + q;
    if point.len() != n {
        return Err(Error::invalid("point dimension mismatch"));
    }
    let u2: f64 = point[p..].iter().map(|u| u * u).sum();
    let f = 4.0 / (1.0 + u2).powi(2);
    let mut r = AffineCurvatureModel::zeros(n);
    for i in p..n {
        for j in p..n {
            if i != j {
                // R_{ijj}^i = g_jj, R_{iji}^j = −g_ii
                r.set(i, j, j, i, f);
                r.set(i, j, i, j, -f);
            }
        }
    }
    Ok(r)
}

/// Two-dimensional model with prescribed Ricci tensor `ρ`; it is affine
/// projective Osserman exactly when the symmetric part of `ρ` is definite.
pub fn build_two_dimensional_model(rho: [[f64; 2]; 2]) -> AffineCurvatureModel {
    let mut a = AffineCurvatureModel::zeros(2);
    a.set_antisymmetric(0, 1, 0, 1, -rho[0][0]);
    a.set_antisymmetric(0, 1, 1, 0, rho[1][1]);
    a.set_antisymmetric(0, 1, 1, 1, -rho[0][1]);
    a.set_antisymmetric(0, 1, 0, 0, rho[1][0]);
    a
}

/// Random symmetric 2-tensor with polynomial components of degree `<= degree`
/// in the `m` base variables (degree 0 gives a constant tensor).
pub fn random_symmetric_tensor(m: usize, degree: u32, seed: u64) -> SymmetricTwoTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi = vec![Polynomial::zero(m); m * m];
    for i in 0..m {
        for j in i..m {
            let p = random_polynomial(&mut rng, m, m, degree);
            phi[i * m + j] = p.clone();
            phi[j * m + i] = p;
        }
    }
    SymmetricTwoTensor::new(m, phi).expect("symmetric by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_summary;

    #[test]
    fn nilpotent_connection_support() {
        let c = build_nilpotent_connection(2, 3, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let p = c.gamma(i, j, k);
                    if (i, j, k) == (0, 0, 1) {
                        assert!(!p.is_zero());
                        assert!(p.depends_only_on(|v| v == 0));
                    } else {
                        assert!(p.is_zero());
                    }
                }
            }
        }
        assert_eq!(
            build_nilpotent_connection(3, 2, 7).unwrap(),
            build_nilpotent_connection(3, 2, 7).unwrap()
        );
    }

    #[test]
    fn m_eps_zero_is_constant_curvature() {
        let a = build_m_eps_model(3, 0.0).unwrap();
        assert_eq!(a, model_from_fn(3, constant_curvature_term));
    }

    #[test]
    fn quaternion_identities_hold_exactly() {
        let f = QuaternionFrame::new(2);
        let id = SquareMatrix::identity(8);
        let s = f.structures();
        for a in 0..3 {
            for b in 0..3 {
                let anti = s[a]
                    .mul(s[b])
                    .as_slice()
                    .iter()
                    .zip(s[b].mul(s[a]).as_slice())
                    .map(|(x, y)| x + y)
                    .collect::<Vec<_>>();
                let expect: Vec<f64> = id
                    .as_slice()
                    .iter()
                    .map(|v| if a == b { -2.0 * v } else { 0.0 })
                    .collect();
                assert_eq!(anti, expect);
            }
            assert_eq!(s[a].mul(&s[a].transpose()), id);
        }
        assert_eq!(f.j1.mul(&f.j2), f.j3);
    }

    #[test]
    fn two_dimensional_model_realizes_ricci() {
        let rho = [[1.5, 0.25], [-0.5, 2.0]];
        let a = build_two_dimensional_model(rho);
        assert!(a.validate().is_valid());
        let r = a.ricci();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(r.rho[i][j], rho[i][j]);
            }
        }
    }

    #[test]
    fn complex_fubini_study_spectrum() {
        let a = build_complex_model(2, 1.0, 1.0, 0.0).unwrap();
        let s = spectral_summary(&a.jacobi(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 1e-7).unwrap();
        let ev: Vec<f64> = s.expanded().iter().map(|z| z.re).collect();
        assert_eq!(ev.len(), 4);
        for (got, want) in ev.iter().zip([0.0, 1.0, 1.0, 4.0]) {
            assert!((got - want).abs() < 1e-10, "{ev:?}");
        }
    }
}
