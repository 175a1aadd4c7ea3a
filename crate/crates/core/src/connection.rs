//! Torsion-free affine connections with polynomial Christoffel symbols on a
//! coordinate chart: curvature, its covariant derivative, geodesics and a
//! pointwise Osserman check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    check_affine_projective_osserman, AffineCurvatureModel, CheckConfig, DirectionSampler,
    OssermanVerdict,
};
use crate::poly::Polynomial;

/// Default velocity norm beyond which a geodesic counts as blown up.
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e6;

/// `∇_{∂_i} ∂_j = Σ_k Γ_{ij}^k ∂_k` with `Γ_{ij}^k = Γ_{ji}^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConnection {
    m: usize,
    /// Indexed `(i * m + j) * m + k`.
    gamma: Vec<Polynomial>,
}

impl AffineConnection {
    /// The flat connection (all symbols zero).
    pub fn flat(m: usize) -> Self {
        assert!(m > 0, "dimension must be positive");
        AffineConnection {
            m,
            gamma: vec![Polynomial::zero(m); m * m * m],
        }
    }

    /// Builds from a dense symbol array, rejecting torsion.
    pub fn from_symbols(m: usize, gamma: Vec<Polynomial>) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if gamma.len() != m * m * m {
            return Err(Error::invalid(format!(
                "dimension {m} needs {} Christoffel symbols, got {}",
                m * m * m,
                gamma.len()
            )));
        }
        if let Some(p) = gamma.iter().find(|p| p.n_vars() != m) {
            return Err(Error::invalid(format!(
                "Christoffel symbol in {} variables, chart dimension is {m}",
                p.n_vars()
            )));
        }
        let c = AffineConnection { m, gamma };
        for i in 0..m {
            for j in i + 1..m {
                for k in 0..m {
                    if c.gamma(i, j, k) != c.gamma(j, i, k) {
                        return Err(Error::invalid(format!(
                            "connection has torsion: symbol ({},{},{}) differs from ({},{},{})",
                            i + 1,
                            j + 1,
                            k + 1,
                            j + 1,
                            i + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(c)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.m + j) * self.m + k
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Polynomial {
        &self.gamma[self.idx(i, j, k)]
    }

    /// Sets `Γ_{ij}^k` and `Γ_{ji}^k` together, keeping the connection torsion-free.
    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, p: Polynomial) {
        assert_eq!(p.n_vars(), self.m, "variable count mismatch");
        let a = self.idx(i, j, k);
        let b = self.idx(j, i, k);
        self.gamma[a] = p.clone();
        self.gamma[b] = p;
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.m {
            return Err(Error::invalid(format!(
                "point has length {}, chart dimension is {}",
                point.len(),
                self.m
            )));
        }
        if point.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite point"));
        }
        Ok(())
    }

    /// Symbol values at a point, indexed like the symbols.
    pub fn gamma_values(&self, point: &[f64]) -> Vec<f64> {
        self.gamma.iter().map(|p| p.eval(point)).collect()
    }

    /// Curvature components `R_{ijk}^l` at a point.
    pub fn curvature_at(&self, point: &[f64]) -> Result<AffineCurvatureModel> {
        self.check_point(point)?;
        let m = self.m;
        let mut values = vec![0.0; m * m * m];
        let mut dgamma = vec![0.0; m * m * m * m];
        for (s, p) in self.gamma.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let jet = p.eval_jet2(point);
            values[s] = jet.value;
            for d in 0..m {
                dgamma[d * m * m * m + s] = jet.gradient[d];
            }
        }
        Ok(curvature_from_christoffel(m, &values, &dgamma))
    }

    /// Curvature components as polynomials, indexed `((i*m+j)*m+k)*m+l`.
    pub fn curvature_polynomials(&self) -> Vec<Polynomial> {
        let m = self.m;
        let mut out = Vec::with_capacity(m.pow(4));
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let mut r = self
                            .gamma(j, k, l)
                            .derivative(i)
                            .sub(&self.gamma(i, k, l).derivative(j));
                        for n in 0..m {
                            r = r
                                .add(&self.gamma(i, n, l).mul(self.gamma(j, k, n)))
                                .sub(&self.gamma(j, n, l).mul(self.gamma(i, k, n)));
                        }
                        out.push(r);
                    }
                }
            }
        }
        out
    }

    /// Components `l` of `(∇_{∂_d} R)(∂_i, ∂_j) ∂_k` at a point (zero-based indices):
    ///
    /// `∂_d R_{ijk}^l + Γ_{dn}^l R_{ijk}^n − Γ_{di}^n R_{njk}^l − Γ_{dj}^n R_{ink}^l − Γ_{dk}^n R_{ijn}^l`.
    ///
    /// The derivative `∂_d R` is taken symbolically on the curvature polynomials.
    pub fn covariant_derivative_r_at(
        &self,
        point: &[f64],
        i: usize,
        j: usize,
        k: usize,
        d: usize,
    ) -> Result<Vec<f64>> {
        self.check_point(point)?;
        let m = self.m;
        if [i, j, k, d].iter().any(|&x| x >= m) {
            return Err(Error::invalid(format!(
                "index out of range for dimension {m}"
            )));
        }
        let rpoly = self.curvature_polynomials();
        let ridx = |a: usize, b: usize, c: usize, l: usize| ((a * m + b) * m + c) * m + l;
        let r: Vec<f64> = rpoly.iter().map(|p| p.eval(point)).collect();
        let g = self.gamma_values(point);
        let gi = |a: usize, b: usize, c: usize| g[(a * m + b) * m + c];
        let mut out = vec![0.0; m];
        for (l, o) in out.iter_mut().enumerate() {
            let mut v = rpoly[ridx(i, j, k, l)].derivative(d).eval(point);
            for n in 0..m {
                v += gi(d, n, l) * r[ridx(i, j, k, n)];
                v -= gi(d, i, n) * r[ridx(n, j, k, l)];
                v -= gi(d, j, n) * r[ridx(i, n, k, l)];
                v -= gi(d, k, n) * r[ridx(i, j, n, l)];
            }
            *o = v;
        }
        Ok(out)
    }

    /// `ẍ^k = −Γ_{ij}^k(x) ẋ^i ẋ^j`
    fn acceleration(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut a = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                let vv = v[i] * v[j];
                if vv == 0.0 {
                    continue;
                }
                for (k, ak) in a.iter_mut().enumerate() {
                    let p = self.gamma(i, j, k);
                    if !p.is_zero() {
                        *ak -= p.eval(x) * vv;
                    }
                }
            }
        }
        a
    }

    /// Integrates the geodesic equation with fixed-step classical RK4.
    ///
    /// Stops at `t_max`, or as soon as `‖ẋ‖` exceeds `blowup_threshold`
    /// (reported at the end of the crossing step), or when the state stops
    /// being finite (reported at the last finite step).
    pub fn geodesic_integrate(
        &self,
        x0: &[f64],
        v0: &[f64],
        t_max: f64,
        dt: f64,
        blowup_threshold: f64,
    ) -> Result<Geodesic> {
        self.check_point(x0)?;
        self.check_point(v0)?;
        if !(dt > 0.0 && t_max > 0.0 && blowup_threshold > 0.0) {
            return Err(Error::invalid(
                "dt, t_max and blowup_threshold must be positive",
            ));
        }
        let m = self.m;
        let mut x = x0.to_vec();
        let mut v = v0.to_vec();
        let mut t = 0.0;
        let mut trajectory = vec![GeodesicState {
            t,
            x: x.clone(),
            v: v.clone(),
        }];
        let axpy = |base: &[f64], h: f64, d: &[f64]| -> Vec<f64> {
            base.iter().zip(d).map(|(b, d)| b + h * d).collect()
        };
        let steps = (t_max / dt).ceil() as u64;
        for step in 1..=steps {
            let h = (t_max - t).min(dt);
            let k1x = v.clone();
            let k1v = self.acceleration(&x, &v);
            let x2 = axpy(&x, 0.5 * h, &k1x);
            let v2 = axpy(&v, 0.5 * h, &k1v);
            let k2v = self.acceleration(&x2, &v2);
            let x3 = axpy(&x, 0.5 * h, &v2);
            let v3 = axpy(&v, 0.5 * h, &k2v);
            let k3v = self.acceleration(&x3, &v3);
            let x4 = axpy(&x, h, &v3);
            let v4 = axpy(&v, h, &k3v);
            let k4v = self.acceleration(&x4, &v4);
            let nx: Vec<f64> = (0..m)
                .map(|i| x[i] + h / 6.0 * (k1x[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]))
                .collect();
            let nv: Vec<f64> = (0..m)
                .map(|i| v[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]))
                .collect();
            if nx.iter().chain(&nv).any(|z| !z.is_finite()) {
                return Ok(Geodesic {
                    trajectory,
                    outcome: GeodesicOutcome::BlewUpAt { t },
                });
            }
            t = if step == steps {
                t_max
            } else {
                step as f64 * dt
            };
            x = nx;
            v = nv;
            trajectory.push(GeodesicState {
                t,
                x: x.clone(),
                v: v.clone(),
            });
            let speed = v.iter().map(|z| z * z).sum::<f64>().sqrt();
            if speed > blowup_threshold {
                return Ok(Geodesic {
                    trajectory,
                    outcome: GeodesicOutcome::BlewUpAt { t },
                });
            }
        }
        Ok(Geodesic {
            trajectory,
            outcome: GeodesicOutcome::Completed,
        })
    }

    /// Osserman check on the curvature model of the tangent space at `point`.
    pub fn check_osserman_at(
        &self,
        point: &[f64],
        sampler: &DirectionSampler,
        n_samples: usize,
        cfg: &CheckConfig,
    ) -> Result<OssermanVerdict> {
        let model = self.curvature_at(point)?;
        let mut verdict = check_affine_projective_osserman(&model, sampler, n_samples, cfg)?;
        if let Some(w) = verdict.witness.as_mut() {
            w.point = Some(point.to_vec());
        }
        Ok(verdict)
    }
}

/// Free-function form of [`AffineConnection::check_osserman_at`].
pub fn check_connection_osserman_at(
    c: &AffineConnection,
    point: &[f64],
    sampler: &DirectionSampler,
    n_samples: usize,
    cfg: &CheckConfig,
) -> Result<OssermanVerdict> {
    c.check_osserman_at(point, sampler, n_samples, cfg)
}

/// `R_{ijk}^l = ∂_iΓ_{jk}^l − ∂_jΓ_{ik}^l + Γ_{in}^lΓ_{jk}^n − Γ_{jn}^lΓ_{ik}^n`
/// from symbol values `gamma[(i*m+j)*m+k]` and derivatives
/// `dgamma[((d*m+i)*m+j)*m+k] = ∂_d Γ_{ij}^k`.
pub(crate) fn curvature_from_christoffel(
    m: usize,
    gamma: &[f64],
    dgamma: &[f64],
) -> AffineCurvatureModel {
    let g = |i: usize, j: usize, k: usize| gamma[(i * m + j) * m + k];
    let dg = |d: usize, i: usize, j: usize, k: usize| dgamma[((d * m + i) * m + j) * m + k];
    let mut r = AffineCurvatureModel::zeros(m);
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                for l in 0..m {
                    let mut v = dg(i, j, k, l) - dg(j, i, k, l);
                    for n in 0..m {
                        v += g(i, n, l) * g(j, k, n) - g(j, n, l) * g(i, k, n);
                    }
                    r.set_antisymmetric(i, j, k, l, v);
                }
            }
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GeodesicOutcome {
    Completed,
    BlewUpAt { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub trajectory: Vec<GeodesicState>,
    pub outcome: GeodesicOutcome,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_connection_is_flat() {
        let c = AffineConnection::flat(3);
        assert_eq!(c.curvature_at(&[1.0, 2.0, 3.0]).unwrap().max_abs(), 0.0);
        let d = c.covariant_derivative_r_at(&[0.0; 3], 0, 1, 2, 0).unwrap();
        assert!(d.iter().all(|&x| x == 0.0));
        let g = c
            .geodesic_integrate(&[0.0; 3], &[1.0, 2.0, 0.0], 1.0, 0.01, 1e6)
            .unwrap();
        assert_eq!(g.outcome, GeodesicOutcome::Completed);
        let last = g.trajectory.last().unwrap();
        assert!((last.x[0] - 1.0).abs() < 1e-12 && (last.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn torsion_is_rejected() {
        let mut g = vec![Polynomial::zero(2); 8];
        g[2] = Polynomial::constant(2, 1.0); // Γ_{12}^1 without Γ_{21}^1
        assert!(AffineConnection::from_symbols(2, g).is_err());
    }

    #[test]
    fn nilpotent_instance_has_nilpotent_jacobi() {
        // Γ_{11}^3 = x1 x2 in m = 3
        let mut c = AffineConnection::flat(3);
        c.set_symmetric(0, 0, 2, Polynomial::monomial(1.0, vec![1, 1, 0]));
        let r = c.curvature_at(&[1.0, 1.0, 0.0]).unwrap();
        assert!(r.validate().is_valid());
        // R_{211}^3 = ∂_2 Γ_{11}^3 = x1 = 1
        assert_eq!(r.get(1, 0, 0, 2), 1.0);
        let j = r.jacobi(&[0.3, -0.7, 1.1]).unwrap();
        assert!(j.pow(3).max_abs() < 1e-14);
    }

    #[test]
    fn symbolic_and_jet_curvature_agree() {
        let mut c = AffineConnection::flat(2);
        c.set_symmetric(0, 1, 1, Polynomial::monomial(2.0, vec![2, 1]));
        c.set_symmetric(1, 1, 0, Polynomial::var(2, 0));
        let p = [0.4, -1.3];
        let r = c.curvature_at(&p).unwrap();
        for (s, poly) in c.curvature_polynomials().iter().enumerate() {
            assert!((poly.eval(&p) - r.components()[s]).abs() < 1e-13);
        }
    }
}
