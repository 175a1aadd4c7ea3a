//! Algebraic affine curvature models `A(e_i, e_j) e_k = Σ_l A_{ijk}^l e_l`.

mod osserman;
mod sampler;

pub use osserman::{
    check_affine_projective_osserman, scaling_between, scaling_factor, CheckConfig,
    OssermanVerdict, ScalingFactor, ScalingSample, VerdictKind, Witness, DEFAULT_CHECK_TOL,
};
pub(crate) use osserman::{decide, JacobiSample};
pub use sampler::DirectionSampler;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Absolute residual allowed by [`AffineCurvatureModel::validate`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Rank-4 component array with the symmetries of an affine curvature operator.
///
/// Symmetries are checked by [`validate`](Self::validate), never imposed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineCurvatureModel {
    m: usize,
    a: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Antisymmetry,
    Bianchi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub identity: Identity,
    /// Zero-based `(i, j, k, l)`.
    pub indices: [usize; 4],
    pub residual: f64,
}

/// Violated identities; empty when the model is a valid curvature model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelDiagnostics {
    pub violations: Vec<Violation>,
}

impl ModelDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_residual(&self, identity: Identity) -> f64 {
        self.violations
            .iter()
            .filter(|v| v.identity == identity)
            .map(|v| v.residual)
            .fold(0.0, f64::max)
    }
}

/// Ricci tensor `ρ(x, y) = Tr{z -> A(z, x) y}` and its symmetric part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RicciTensor {
    pub m: usize,
    pub rho: Vec<Vec<f64>>,
    pub rho_sym: Vec<Vec<f64>>,
}

impl RicciTensor {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                s += self.rho[i][j] * x[i] * y[j];
            }
        }
        s
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.m).all(|i| (0..self.m).all(|j| (self.rho[i][j] - self.rho[j][i]).abs() <= tol))
    }
}

impl AffineCurvatureModel {
    pub fn zeros(m: usize) -> Self {
        assert!(m > 0, "dimension must be positive");
        AffineCurvatureModel {
            m,
            a: vec![0.0; m * m * m * m],
        }
    }

    /// Dense components in `(i, j, k, l)` row-major order.
    pub fn from_components(m: usize, a: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if a.len() != m.pow(4) {
            return Err(Error::invalid(format!(
                "dimension {m} needs {} components, got {}",
                m.pow(4),
                a.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite curvature component"));
        }
        Ok(AffineCurvatureModel { m, a })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.m + j) * self.m + k) * self.m + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.a[self.idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let id = self.idx(i, j, k, l);
        self.a[id] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let id = self.idx(i, j, k, l);
        self.a[id] += v;
    }

    /// Sets `A_{ijk}^l = v` and `A_{jik}^l = -v`.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.set(i, j, k, l, v);
        self.set(j, i, k, l, -v);
    }

    pub fn components(&self) -> &[f64] {
        &self.a
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Linear combination `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::invalid("dimension mismatch"));
        }
        Ok(AffineCurvatureModel {
            m: self.m,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x + c * y)
                .collect(),
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        AffineCurvatureModel {
            m: self.m,
            a: self.a.iter().map(|x| c * x).collect(),
        }
    }

    /// `(A(x, y) z)^l`
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        for i in 0..m {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..m {
                    let c = xy * z[k];
                    if c == 0.0 {
                        continue;
                    }
                    for (l, o) in out.iter_mut().enumerate() {
                        *o += c * self.get(i, j, k, l);
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> ModelDiagnostics {
        self.validate_with_tol(SYMMETRY_TOL)
    }

    pub fn validate_with_tol(&self, tol: f64) -> ModelDiagnostics {
        let m = self.m;
        let mut violations = Vec::new();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        if i <= j {
                            let r = (self.get(i, j, k, l) + self.get(j, i, k, l)).abs();
                            if r > tol {
                                violations.push(Violation {
                                    identity: Identity::Antisymmetry,
                                    indices: [i, j, k, l],
                                    residual: r,
                                });
                            }
                        }
                        let r =
                            (self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l))
                                .abs();
                        // cyclic sums repeat under rotation; report each once
                        let canonical = (i, j, k) <= (j, k, i) && (i, j, k) <= (k, i, j);
                        if r > tol && canonical {
                            violations.push(Violation {
                                identity: Identity::Bianchi,
                                indices: [i, j, k, l],
                                residual: r,
                            });
                        }
                    }
                }
            }
        }
        ModelDiagnostics { violations }
    }

    /// Matrix of `w -> A(w, v) v`: entry `[l][a] = Σ_{j,k} A_{ajk}^l v^j v^k`.
    pub fn jacobi(&self, v: &[f64]) -> Result<SquareMatrix> {
        let m = self.m;
        if v.len() != m {
            return Err(Error::invalid(format!(
                "direction has length {}, model dimension is {m}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite direction"));
        }
        let mut out = SquareMatrix::zeros(m);
        for a in 0..m {
            for j in 0..m {
                if v[j] == 0.0 {
                    continue;
                }
                for k in 0..m {
                    let c = v[j] * v[k];
                    if c == 0.0 {
                        continue;
                    }
                    for l in 0..m {
                        out.add_at(l, a, c * self.get(a, j, k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn ricci(&self) -> RicciTensor {
        let m = self.m;
        let rho: Vec<Vec<f64>> = (0..m)
            .map(|x| {
                (0..m)
                    .map(|y| (0..m).map(|z| self.get(z, x, y, z)).sum())
                    .collect()
            })
            .collect();
        let rho_sym = (0..m)
            .map(|i| (0..m).map(|j| 0.5 * (rho[i][j] + rho[j][i])).collect())
            .collect();
        RicciTensor { m, rho, rho_sym }
    }
}
