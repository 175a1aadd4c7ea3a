//! Pseudo-Riemannian metrics on a chart: Levi-Civita connection and curvature
//! from second-order jets, metric Jacobi operators, pseudo-sphere sampling,
//! spacelike / timelike projective Osserman checks, and the deformed and
//! modified extension metrics on the cotangent bundle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connection::{curvature_from_christoffel, AffineConnection};
use crate::error::{Error, Result};
use crate::linalg::eigen::{invert, symmetric_eigenvalues};
use crate::linalg::{spectral_summary_with, SpectralOptions, SpectralSummary, SquareMatrix};
use crate::model::{
    decide, AffineCurvatureModel, CheckConfig, DirectionSampler, JacobiSample, OssermanVerdict,
};
use crate::poly::{Polynomial, RationalFunction};

/// Relative determinant below which the metric counts as degenerate.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Minimal `sign · g(v, v)` for a Euclidean-unit draw to be kept by the sampler.
pub const CONE_MARGIN: f64 = 1e-6;

/// Symmetric metric `g_{ij}` with declared signature: `neg` negative and
/// `pos` positive eigenvalues. The signature is verified lazily at every
/// evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoMetric {
    n: usize,
    /// Row-major `n x n`.
    g: Vec<RationalFunction>,
    neg: usize,
    pos: usize,
}

/// Metric value and derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub n: usize,
    pub g: SquareMatrix,
    pub g_inv: SquareMatrix,
    /// `dg[(a*n+i)*n+j] = ∂_a g_{ij}`
    pub dg: Vec<f64>,
    /// `ddg[((a*n+b)*n+i)*n+j] = ∂_a ∂_b g_{ij}`
    pub ddg: Vec<f64>,
}

/// Levi-Civita symbols `Γ_{ij}^k` and first derivatives `∂_d Γ_{ij}^k` at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Christoffel {
    pub n: usize,
    /// Indexed `(i*n+j)*n+k`.
    pub gamma: Vec<f64>,
    /// Indexed `((d*n+i)*n+j)*n+k`.
    pub dgamma: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    pub fn derivative(&self, d: usize, i: usize, j: usize, k: usize) -> f64 {
        self.dgamma[((d * self.n + i) * self.n + j) * self.n + k]
    }
}

impl PseudoMetric {
    /// Builds from dense row-major components; requires exact symmetry and `neg + pos = n`.
    pub fn new(n: usize, g: Vec<RationalFunction>, neg: usize, pos: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if g.len() != n * n {
            return Err(Error::invalid(format!(
                "dimension {n} needs {} metric components, got {}",
                n * n,
                g.len()
            )));
        }
        if neg + pos != n {
            return Err(Error::invalid(format!(
                "signature ({neg},{pos}) does not add up to dimension {n}"
            )));
        }
        for f in &g {
            let dn = f.denominator.as_ref().map_or(n, |d| d.n_vars());
            if f.numerator.n_vars() != n || dn != n {
                return Err(Error::invalid(format!(
                    "metric component must use {n} variables"
                )));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if g[i * n + j] != g[j * n + i] {
                    return Err(Error::invalid(format!(
                        "metric is not symmetric at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(PseudoMetric { n, g, neg, pos })
    }

    /// Polynomial-component convenience constructor.
    pub fn from_polynomials(n: usize, g: Vec<Polynomial>, neg: usize, pos: usize) -> Result<Self> {
        Self::new(
            n,
            g.into_iter().map(RationalFunction::polynomial).collect(),
            neg,
            pos,
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `(negative count, positive count)`
    pub fn signature(&self) -> (usize, usize) {
        (self.neg, self.pos)
    }

    pub fn component(&self, i: usize, j: usize) -> &RationalFunction {
        &self.g[i * self.n + j]
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.n {
            return Err(Error::invalid(format!(
                "point has length {}, chart dimension is {}",
                point.len(),
                self.n
            )));
        }
        if point.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite point"));
        }
        Ok(())
    }

    /// Metric matrix at a point, after checking invertibility and signature.
    pub fn value_at(&self, point: &[f64]) -> Result<SquareMatrix> {
        self.check_point(point)?;
        let n = self.n;
        let g = SquareMatrix::from_fn(n, |i, j| self.g[i * n + j].eval(point));
        self.check_nondegenerate(&g)?;
        Ok(g)
    }

    fn check_nondegenerate(&self, g: &SquareMatrix) -> Result<SquareMatrix> {
        if !g.is_finite() {
            return Err(Error::invalid("metric is not finite at this point"));
        }
        let scale = g.max_abs().max(f64::MIN_POSITIVE);
        let Some((inv, det)) = invert(g) else {
            return Err(Error::SingularMetric { det: 0.0 });
        };
        if det.abs() <= SINGULAR_TOL * scale.powi(self.n as i32) {
            return Err(Error::SingularMetric { det });
        }
        let ev = symmetric_eigenvalues(g);
        let found_neg = ev.iter().filter(|&&e| e < 0.0).count();
        let found_pos = ev.len() - found_neg;
        if found_neg != self.neg || found_pos != self.pos {
            return Err(Error::SignatureMismatch {
                found_neg,
                found_pos,
                declared_neg: self.neg,
                declared_pos: self.pos,
            });
        }
        Ok(inv)
    }

    /// Value, inverse, first and second derivatives of the metric at a point.
    pub fn jet_at(&self, point: &[f64]) -> Result<MetricJet> {
        self.check_point(point)?;
        let n = self.n;
        let mut g = SquareMatrix::zeros(n);
        let mut dg = vec![0.0; n * n * n];
        let mut ddg = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in i..n {
                let f = &self.g[i * n + j];
                if f.is_zero() {
                    continue;
                }
                let jet = f.eval_jet2(point);
                for (a, b) in [(i, j), (j, i)] {
                    g.set(a, b, jet.value);
                    for d in 0..n {
                        dg[(d * n + a) * n + b] = jet.gradient[d];
                        for e in 0..n {
                            ddg[((d * n + e) * n + a) * n + b] = jet.hess(d, e);
                        }
                    }
                }
            }
        }
        let g_inv = self.check_nondegenerate(&g)?;
        Ok(MetricJet {
            n,
            g,
            g_inv,
            dg,
            ddg,
        })
    }

    /// `Γ_{ij}^k = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})` and its first
    /// derivatives, using `∂ g^{-1} = −g^{-1} (∂g) g^{-1}`.
    pub fn levi_civita_at(&self, point: &[f64]) -> Result<Christoffel> {
        let jet = self.jet_at(point)?;
        let n = self.n;
        let dg = |a: usize, i: usize, j: usize| jet.dg[(a * n + i) * n + j];
        let ddg = |a: usize, b: usize, i: usize, j: usize| jet.ddg[((a * n + b) * n + i) * n + j];
        let ginv = |i: usize, j: usize| jet.g_inv.get(i, j);

        // Koszul combination K_{ijl} and its derivatives ∂_d K_{ijl}.
        let mut kz = vec![0.0; n * n * n];
        let mut dkz = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    kz[(i * n + j) * n + l] = dg(i, j, l) + dg(j, i, l) - dg(l, i, j);
                    for d in 0..n {
                        dkz[((d * n + i) * n + j) * n + l] =
                            ddg(d, i, j, l) + ddg(d, j, i, l) - ddg(d, l, i, j);
                    }
                }
            }
        }
        // ∂_d g^{kl}
        let mut dginv = vec![0.0; n * n * n];
        for d in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = 0.0;
                    for a in 0..n {
                        let ka = ginv(k, a);
                        if ka == 0.0 {
                            continue;
                        }
                        for b in 0..n {
                            s += ka * dg(d, a, b) * ginv(b, l);
                        }
                    }
                    dginv[(d * n + k) * n + l] = -s;
                }
            }
        }
        let mut gamma = vec![0.0; n * n * n];
        let mut dgamma = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let mut v = 0.0;
                    for l in 0..n {
                        v += ginv(k, l) * kz[(i * n + j) * n + l];
                    }
                    gamma[(i * n + j) * n + k] = 0.5 * v;
                    gamma[(j * n + i) * n + k] = 0.5 * v;
                    for d in 0..n {
                        let mut w = 0.0;
                        for l in 0..n {
                            w += dginv[(d * n + k) * n + l] * kz[(i * n + j) * n + l]
                                + ginv(k, l) * dkz[((d * n + i) * n + j) * n + l];
                        }
                        dgamma[((d * n + i) * n + j) * n + k] = 0.5 * w;
                        dgamma[((d * n + j) * n + i) * n + k] = 0.5 * w;
                    }
                }
            }
        }
        Ok(Christoffel { n, gamma, dgamma })
    }

    /// Curvature components `R_{ijk}^l` of the Levi-Civita connection.
    pub fn curvature_at(&self, point: &[f64]) -> Result<AffineCurvatureModel> {
        let c = self.levi_civita_at(point)?;
        Ok(curvature_from_christoffel(self.n, &c.gamma, &c.dgamma))
    }

    /// Matrix of `y -> R(y, ξ) ξ` in the chart basis.
    pub fn jacobi_at(&self, point: &[f64], xi: &[f64]) -> Result<SquareMatrix> {
        self.curvature_at(point)?.jacobi(xi)
    }

    /// `g(u, v)` at a point.
    pub fn inner(&self, g: &SquareMatrix, u: &[f64], v: &[f64]) -> f64 {
        let gv = g.mul_vec(v);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    }
}

/// Levi-Civita symbols at a point; see [`PseudoMetric::levi_civita_at`].
pub fn levi_civita_at(g: &PseudoMetric, point: &[f64]) -> Result<Christoffel> {
    g.levi_civita_at(point)
}

/// Metric curvature at a point; see [`PseudoMetric::curvature_at`].
pub fn metric_curvature_at(g: &PseudoMetric, point: &[f64]) -> Result<AffineCurvatureModel> {
    g.curvature_at(point)
}

/// Metric Jacobi operator at a point; see [`PseudoMetric::jacobi_at`].
pub fn metric_jacobi(g: &PseudoMetric, point: &[f64], xi: &[f64]) -> Result<SquareMatrix> {
    g.jacobi_at(point, xi)
}

/// Tangent vectors with `g(ξ, ξ) = sign`, drawn from the deterministic
/// direction stream (basis vectors, pairwise sums and differences, then
/// seeded random unit vectors). Draws with `sign · g(v, v) <= 1e-6` are
/// rejected; at most `100 n` draws are made.
pub fn pseudo_sphere_sample(
    g: &PseudoMetric,
    point: &[f64],
    sign: i32,
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if sign != 1 && sign != -1 {
        return Err(Error::invalid("sign must be +1 or -1"));
    }
    let (neg, pos) = g.signature();
    if (sign < 0 && neg == 0) || (sign > 0 && pos == 0) {
        return Err(Error::EmptyCone { sign, neg, pos });
    }
    let gm = g.value_at(point)?;
    let sampler = DirectionSampler::new(g.dim(), seed);
    let budget = 100 * n.max(1);
    let sgn = sign as f64;
    let out: Vec<Vec<f64>> = sampler
        .structured()
        .into_iter()
        .chain(sampler.random())
        .take(budget)
        .filter_map(|v| {
            let q = g.inner(&gm, &v, &v);
            (sgn * q > CONE_MARGIN).then(|| {
                let s = 1.0 / q.abs().sqrt();
                v.iter().map(|x| x * s).collect()
            })
        })
        .take(n)
        .collect();
    if out.len() < n {
        return Err(Error::SamplingFailure {
            attempts: budget,
            found: out.len(),
            requested: n,
        });
    }
    Ok(out)
}

/// Per-point part of a metric Osserman check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDetail {
    pub point: Vec<f64>,
    pub samples: usize,
    pub nilpotent_samples: usize,
    /// Spectrum at the first direction sampled at this point.
    pub first_spectrum: SpectralSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricOssermanReport {
    pub sign: i32,
    pub verdict: OssermanVerdict,
    pub points: Vec<PointDetail>,
}

/// Spacelike (`sign = +1`) or timelike (`sign = -1`) projective Osserman check.
///
/// Samples `n_samples` unit directions at each point (seed offset by the point
/// index); the first sample at the first point is the reference.
pub fn check_metric_projective_osserman(
    g: &PseudoMetric,
    points: &[Vec<f64>],
    sign: i32,
    n_samples: usize,
    seed: u64,
    cfg: &CheckConfig,
) -> Result<MetricOssermanReport> {
    if points.is_empty() || n_samples == 0 {
        return Err(Error::invalid(
            "at least one point and one sample are required",
        ));
    }
    let mut tasks: Vec<(usize, Vec<f64>)> = Vec::with_capacity(points.len() * n_samples);
    let mut curvatures = Vec::with_capacity(points.len());
    for (pi, p) in points.iter().enumerate() {
        let dirs = pseudo_sphere_sample(g, p, sign, n_samples, seed.wrapping_add(pi as u64))?;
        curvatures.push(g.curvature_at(p)?);
        tasks.extend(dirs.into_iter().map(|d| (pi, d)));
    }
    let evaluated = cfg.execution.map(&tasks, |(pi, d)| {
        let j = curvatures[*pi].jacobi(d)?;
        JacobiSample::evaluate(d.clone(), Some(points[*pi].clone()), j, &cfg.spectral)
    });
    let samples = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    let details = points
        .iter()
        .enumerate()
        .map(|(pi, p)| {
            let at: Vec<&JacobiSample> = samples[pi * n_samples..(pi + 1) * n_samples]
                .iter()
                .collect();
            PointDetail {
                point: p.clone(),
                samples: at.len(),
                nilpotent_samples: at.iter().filter(|s| s.spectrum.is_nilpotent()).count(),
                first_spectrum: at[0].spectrum.clone(),
            }
        })
        .collect();
    Ok(MetricOssermanReport {
        sign,
        verdict: decide(samples, cfg)?,
        points: details,
    })
}

/// Symmetric 2-tensor `Φ_{ij}` with polynomial components in the base coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTwoTensor {
    m: usize,
    phi: Vec<Polynomial>,
}

impl SymmetricTwoTensor {
    pub fn zero(m: usize) -> Self {
        SymmetricTwoTensor {
            m,
            phi: vec![Polynomial::zero(m); m * m],
        }
    }

    pub fn new(m: usize, phi: Vec<Polynomial>) -> Result<Self> {
        if phi.len() != m * m || phi.iter().any(|p| p.n_vars() != m) {
            return Err(Error::invalid(format!(
                "symmetric tensor needs {} components in {m} variables",
                m * m
            )));
        }
        for i in 0..m {
            for j in i + 1..m {
                if phi[i * m + j] != phi[j * m + i] {
                    return Err(Error::invalid(format!(
                        "tensor is not symmetric at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(SymmetricTwoTensor { m, phi })
    }

    /// Constant tensor from a symmetric matrix.
    pub fn constant(values: &SquareMatrix) -> Result<Self> {
        let m = values.dim();
        Self::new(
            m,
            (0..m * m)
                .map(|s| Polynomial::constant(m, values.get(s / m, s % m)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.phi[i * self.m + j]
    }
}

/// Base point `x` and fiber coordinates `y` of the cotangent bundle chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CotangentChartPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl CotangentChartPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::invalid(
                "base and fiber coordinates differ in length",
            ));
        }
        Ok(CotangentChartPoint { x, y })
    }

    /// Chart coordinates `(x_1..x_m, y_1..y_m)`.
    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    /// Projection to the base.
    pub fn base(&self) -> &[f64] {
        &self.x
    }
}

/// Shared extension builder: `g(∂x_i, ∂x_j) = −2 y_k Γ_{ij}^k(x) + extra_{ij}`,
/// `g(∂x_i, ∂y_j) = δ_ij`, `g(∂y_i, ∂y_j) = 0`, coordinates `(x, y)`.
fn extension(c: &AffineConnection, extra: impl Fn(usize, usize) -> Polynomial) -> PseudoMetric {
    let m = c.dim();
    let n = 2 * m;
    let mut g = vec![Polynomial::zero(n); n * n];
    for i in 0..m {
        for j in 0..m {
            let mut p = extra(i, j);
            for k in 0..m {
                let gk = c.gamma(i, j, k);
                if gk.is_zero() {
                    continue;
                }
                p = p.sub(&gk.lift(n, 0).mul(&Polynomial::var(n, m + k)).scale(2.0));
            }
            g[i * n + j] = p;
        }
        g[i * n + m + i] = Polynomial::constant(n, 1.0);
        g[(m + i) * n + i] = Polynomial::constant(n, 1.0);
    }
    PseudoMetric::from_polynomials(n, g, m, m)
        .expect("extension metric is symmetric by construction")
}

/// Deformed extension `g_{∇,Φ}` on the `2m`-dimensional cotangent chart, signature `(m, m)`.
pub fn deformed_extension(c: &AffineConnection, phi: &SymmetricTwoTensor) -> Result<PseudoMetric> {
    if phi.dim() != c.dim() {
        return Err(Error::invalid("tensor and connection dimensions differ"));
    }
    let n = 2 * c.dim();
    Ok(extension(c, |i, j| phi.get(i, j).lift(n, 0)))
}

/// Modified extension: the deformed extension with `Φ_{ij}` replaced by `y_i y_j`.
pub fn modified_extension(c: &AffineConnection) -> PseudoMetric {
    let m = c.dim();
    let n = 2 * m;
    extension(c, |i, j| {
        Polynomial::var(n, m + i).mul(&Polynomial::var(n, m + j))
    })
}

/// One eigenvalue in the base/extension spectrum comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferPair {
    pub eigenvalue: Complex64,
    pub base_mult: usize,
    pub extension_mult: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub base_direction: Vec<f64>,
    pub base_spectrum: SpectralSummary,
    pub extension_spectrum: SpectralSummary,
    pub pairing: Vec<TransferPair>,
    /// Largest deviation from the block form `(J 0; * Jᵗ)` of the extension Jacobi matrix.
    pub block_residual: f64,
    /// Largest distance between paired eigenvalues.
    pub max_eigenvalue_error: f64,
    pub passed: bool,
}

/// Compares the Jacobi spectrum of the deformed extension at `(point, ξ)` with
/// the base Jacobi spectrum at `a = σ_* ξ`: every base eigenvalue must appear
/// with doubled algebraic multiplicity. Both spectra are divided by the base
/// spectral radius (when non-zero) before comparison.
pub fn verify_spectrum_transfer(
    c: &AffineConnection,
    phi: &SymmetricTwoTensor,
    point: &CotangentChartPoint,
    xi: &[f64],
    tol: f64,
    spectral: &SpectralOptions,
) -> Result<TransferReport> {
    let m = c.dim();
    if point.x.len() != m || xi.len() != 2 * m {
        return Err(Error::invalid("point or direction has the wrong dimension"));
    }
    let a = xi[..m].to_vec();
    let xi_scale = xi.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if a.iter().all(|v| v.abs() <= 1e-14 * xi_scale.max(1.0)) {
        return Err(Error::ProjectionNull);
    }
    let base_j = c.curvature_at(&point.x)?.jacobi(&a)?;
    let g = deformed_extension(c, phi)?;
    let ext_j = g.jacobi_at(&point.coords(), xi)?;

    let norm = base_j.frobenius_norm().max(ext_j.frobenius_norm()).max(1.0);
    let mut block_residual: f64 = 0.0;
    for r in 0..m {
        for s in 0..m {
            block_residual = block_residual
                .max((ext_j.get(r, s) - base_j.get(r, s)).abs())
                .max(ext_j.get(r, m + s).abs())
                .max((ext_j.get(m + r, m + s) - base_j.get(s, r)).abs());
        }
    }
    block_residual /= norm;

    let base_spectrum = spectral_summary_with(&base_j, spectral)?;
    let extension_spectrum = spectral_summary_with(&ext_j, spectral)?;
    let rho = base_spectrum.spectral_radius();
    let unit = if rho > 0.0 { rho } else { 1.0 };

    let mut doubled: Vec<Complex64> = base_spectrum
        .expanded()
        .into_iter()
        .flat_map(|z| [z / unit, z / unit])
        .collect();
    doubled.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    let ext: Vec<Complex64> = extension_spectrum
        .expanded()
        .into_iter()
        .map(|z| z / unit)
        .collect();
    let max_eigenvalue_error = doubled
        .iter()
        .zip(&ext)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max);

    let pairing = base_spectrum
        .entries
        .iter()
        .map(|e| TransferPair {
            eigenvalue: e.eigenvalue,
            base_mult: e.alg_mult,
            extension_mult: extension_spectrum
                .entry_near(e.eigenvalue, tol * (1.0 + rho))
                .map_or(0, |x| x.alg_mult),
        })
        .collect::<Vec<_>>();
    let passed = doubled.len() == ext.len()
        && max_eigenvalue_error <= tol * 2.0
        && pairing.iter().all(|p| p.extension_mult == 2 * p.base_mult);
    Ok(TransferReport {
        base_direction: a,
        base_spectrum,
        extension_spectrum,
        pairing,
        block_residual,
        max_eigenvalue_error,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclidean(n: usize) -> PseudoMetric {
        let g = (0..n * n)
            .map(|s| Polynomial::constant(n, if s / n == s % n { 1.0 } else { 0.0 }))
            .collect();
        PseudoMetric::from_polynomials(n, g, 0, n).unwrap()
    }

    #[test]
    fn flat_metric_has_zero_christoffels() {
        let c = euclidean(3).levi_civita_at(&[0.1, 0.2, 0.3]).unwrap();
        assert!(c.gamma.iter().chain(&c.dgamma).all(|&v| v == 0.0));
    }

    #[test]
    fn euclidean_sampling() {
        let g = euclidean(3);
        let s = pseudo_sphere_sample(&g, &[0.0; 3], 1, 20, 4).unwrap();
        assert_eq!(s.len(), 20);
        for v in &s {
            let q: f64 = v.iter().map(|x| x * x).sum();
            assert!((q - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            pseudo_sphere_sample(&g, &[0.0; 3], -1, 5, 4),
            Err(Error::EmptyCone { .. })
        ));
    }

    #[test]
    fn signature_is_checked_lazily() {
        let g = (0..4)
            .map(|s| Polynomial::constant(2, if s == 0 || s == 3 { 1.0 } else { 0.0 }))
            .collect();
        let wrong = PseudoMetric::from_polynomials(2, g, 1, 1).unwrap();
        assert!(matches!(
            wrong.value_at(&[0.0, 0.0]),
            Err(Error::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn singular_metric_is_rejected() {
        // g = diag(x1, 1) degenerates at x1 = 0
        let g = vec![
            Polynomial::var(2, 0),
            Polynomial::zero(2),
            Polynomial::zero(2),
            Polynomial::constant(2, 1.0),
        ];
        let g = PseudoMetric::from_polynomials(2, g, 0, 2).unwrap();
        assert!(matches!(
            g.levi_civita_at(&[0.0, 0.0]),
            Err(Error::SingularMetric { .. })
        ));
        assert!(g.levi_civita_at(&[1.0, 0.0]).is_ok());
    }

    #[test]
    fn modified_extension_of_flat_line() {
        // m = 1: g = (y^2, 1; 1, 0)
        let g = modified_extension(&AffineConnection::flat(1));
        let v = g.value_at(&[0.3, 2.0]).unwrap();
        assert_eq!(v.as_slice(), &[4.0, 1.0, 1.0, 0.0]);
        // Koszul by hand: Γ_{xx}^x = -y, Γ_{xx}^y = y^3, Γ_{xy}^y = y, others zero
        let c = g.levi_civita_at(&[0.3, 2.0]).unwrap();
        assert!((c.get(0, 0, 0) + 2.0).abs() < 1e-14);
        assert!((c.get(0, 0, 1) - 8.0).abs() < 1e-14);
        assert!((c.get(0, 1, 1) - 2.0).abs() < 1e-14);
        assert_eq!(c.get(0, 1, 0), 0.0);
        assert_eq!(c.get(1, 1, 0), 0.0);
        assert_eq!(c.get(1, 1, 1), 0.0);
    }

    #[test]
    fn projection_null_is_rejected() {
        let c = AffineConnection::flat(2);
        let p = CotangentChartPoint::new(vec![0.0; 2], vec![1.0; 2]).unwrap();
        let r = verify_spectrum_transfer(
            &c,
            &SymmetricTwoTensor::zero(2),
            &p,
            &[0.0, 0.0, 1.0, 0.0],
            1e-8,
            &SpectralOptions::default(),
        );
        assert!(matches!(r, Err(Error::ProjectionNull)));
    }
}
