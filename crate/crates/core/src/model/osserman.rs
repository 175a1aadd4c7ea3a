use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AffineCurvatureModel, DirectionSampler};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{
    power_traces, spectral_summary_with, SpectralOptions, SpectralSummary, SquareMatrix,
};

/// Default relative tolerance for comparing rescaled spectra.
pub const DEFAULT_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    /// Every sampled Jacobi operator is nilpotent.
    AffineOsserman,
    /// Every sampled spectrum is a positive multiple of a fixed non-zero spectrum.
    AffineProjectiveOsserman,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSample {
    pub direction: Vec<f64>,
    pub s: f64,
    pub power: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub direction: Vec<f64>,
    pub point: Option<Vec<f64>>,
    pub spectrum: SpectralSummary,
    pub reason: String,
}

/// Outcome of a sampling check. A pass is a confidence statement over
/// `samples_used` directions, not a proof over the whole tangent space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OssermanVerdict {
    pub kind: VerdictKind,
    pub reference_direction: Vec<f64>,
    pub reference_spectrum: SpectralSummary,
    pub scaling_samples: Vec<ScalingSample>,
    pub witness: Option<Witness>,
    pub samples_used: usize,
}

/// Scale `s` with `Spec J(x) = s · Spec J(y)`, certified by the trace power used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactor {
    pub s: f64,
    pub power: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    /// Spectra match when entrywise distance is at most `tol · (1 + spectral radius)`.
    pub tol: f64,
    pub spectral: SpectralOptions,
    /// Traces `|Tr J^k| <= trace_tol · ‖J‖_F^k` count as vanishing.
    pub trace_tol: f64,
    pub execution: Execution,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            tol: DEFAULT_CHECK_TOL,
            spectral: SpectralOptions::default(),
            trace_tol: 1e-10,
            execution: Execution::default(),
        }
    }
}

/// Scaling between two Jacobi matrices from ratios of power traces.
///
/// Uses the smallest `k <= kmax` at which `Tr jy^k` is non-negligible and
/// takes the positive real `k`-th root. A negative ratio at odd `k` falls back
/// to the next usable even power.
pub fn scaling_between(
    jx: &SquareMatrix,
    jy: &SquareMatrix,
    kmax: usize,
    trace_tol: f64,
) -> Result<ScalingFactor> {
    let tx = power_traces(jx, kmax)?;
    let ty = power_traces(jy, kmax)?;
    let nx = jx.frobenius_norm();
    let ny = jy.frobenius_norm();
    let n = jx.dim().max(1) as f64;
    let small = |t: f64, norm: f64, k: usize| t.abs() <= trace_tol * n * norm.powi(k as i32);

    let x_nil = tx.iter().enumerate().all(|(i, &t)| small(t, nx, i + 1));
    let y_nil = ty.iter().enumerate().all(|(i, &t)| small(t, ny, i + 1));
    if x_nil || y_nil {
        return Err(Error::NilpotentPair {
            x_nilpotent: x_nil,
            y_nilpotent: y_nil,
        });
    }
    let k = (1..=kmax).find(|&k| !small(ty[k - 1], ny, k)).unwrap();
    let ratio = tx[k - 1] / ty[k - 1];
    if ratio > 0.0 {
        return Ok(ScalingFactor {
            s: ratio.powf(1.0 / k as f64),
            power: k,
        });
    }
    if k % 2 == 1 {
        for k2 in (k + 1..=kmax).filter(|k2| k2 % 2 == 0) {
            if small(ty[k2 - 1], ny, k2) {
                continue;
            }
            let r2 = tx[k2 - 1] / ty[k2 - 1];
            if r2 > 0.0 {
                return Ok(ScalingFactor {
                    s: r2.powf(1.0 / k2 as f64),
                    power: k2,
                });
            }
        }
    }
    Err(Error::SpectrumAsymmetry { ratio, power: k })
}

/// `|s(x, y)|` with `Spec J(x) = s · Spec J(y)`; `kmax` defaults to the dimension.
pub fn scaling_factor(
    model: &AffineCurvatureModel,
    x: &[f64],
    y: &[f64],
    kmax: Option<usize>,
) -> Result<ScalingFactor> {
    let jx = model.jacobi(x)?;
    let jy = model.jacobi(y)?;
    scaling_between(&jx, &jy, kmax.unwrap_or(model.dim()), 1e-10)
}

/// One evaluated direction: its Jacobi matrix and spectrum.
pub(crate) struct JacobiSample {
    pub direction: Vec<f64>,
    pub point: Option<Vec<f64>>,
    pub jacobi: SquareMatrix,
    pub spectrum: SpectralSummary,
}

impl JacobiSample {
    pub(crate) fn evaluate(
        direction: Vec<f64>,
        point: Option<Vec<f64>>,
        jacobi: SquareMatrix,
        opts: &SpectralOptions,
    ) -> Result<Self> {
        let spectrum = spectral_summary_with(&jacobi, opts).map_err(|e| match e {
            Error::NumericalFailure { message, partial } => Error::NumericalFailure {
                message: format!("{message} at direction {direction:?}"),
                partial,
            },
            other => other,
        })?;
        Ok(JacobiSample {
            direction,
            point,
            jacobi,
            spectrum,
        })
    }
}

fn spectra_match(got: &SpectralSummary, reference: &SpectralSummary, s: f64, tol: f64) -> bool {
    let a = got.expanded();
    let b: Vec<Complex64> = reference.expanded().into_iter().map(|z| z * s).collect();
    if a.len() != b.len() {
        return false;
    }
    let bound = tol * (1.0 + got.spectral_radius());
    a.iter().zip(&b).all(|(x, y)| (x - y).norm() <= bound)
}

/// Shared verdict logic over evaluated samples (first sample is the reference).
pub(crate) fn decide(samples: Vec<JacobiSample>, cfg: &CheckConfig) -> Result<OssermanVerdict> {
    let Some(first) = samples.first() else {
        return Err(Error::invalid("at least one sample is required"));
    };
    let samples_used = samples.len();
    let reference_direction = first.direction.clone();
    let reference_spectrum = first.spectrum.clone();

    let witness_from = |s: &JacobiSample, reason: String| Witness {
        direction: s.direction.clone(),
        point: s.point.clone(),
        spectrum: s.spectrum.clone(),
        reason,
    };

    if samples.iter().all(|s| s.spectrum.is_nilpotent()) {
        return Ok(OssermanVerdict {
            kind: VerdictKind::AffineOsserman,
            reference_direction,
            reference_spectrum,
            scaling_samples: Vec::new(),
            witness: None,
            samples_used,
        });
    }

    let mut verdict = OssermanVerdict {
        kind: VerdictKind::AffineProjectiveOsserman,
        reference_direction,
        reference_spectrum,
        scaling_samples: Vec::with_capacity(samples_used),
        witness: None,
        samples_used,
    };

    if let Some(nil) = samples.iter().find(|s| s.spectrum.is_nilpotent()) {
        verdict.kind = VerdictKind::Neither;
        verdict.witness = Some(witness_from(
            nil,
            "spectrum is {0} while other directions have non-zero eigenvalues".into(),
        ));
        return Ok(verdict);
    }

    let kmax = first.jacobi.dim();
    for s in &samples {
        let factor = match scaling_between(&s.jacobi, &first.jacobi, kmax, cfg.trace_tol) {
            Ok(f) => f,
            Err(e @ (Error::NilpotentPair { .. } | Error::SpectrumAsymmetry { .. })) => {
                verdict.kind = VerdictKind::Neither;
                verdict.witness = Some(witness_from(s, e.to_string()));
                return Ok(verdict);
            }
            Err(e) => return Err(e),
        };
        if !spectra_match(&s.spectrum, &first.spectrum, factor.s, cfg.tol) {
            verdict.kind = VerdictKind::Neither;
            verdict.witness = Some(witness_from(
                s,
                format!(
                    "spectrum is not {:.6} times the reference spectrum",
                    factor.s
                ),
            ));
            return Ok(verdict);
        }
        verdict.scaling_samples.push(ScalingSample {
            direction: s.direction.clone(),
            s: factor.s,
            power: factor.power,
        });
    }
    Ok(verdict)
}

/// Samples `n_samples` directions and decides whether the model is affine
/// Osserman (all nilpotent), affine projective Osserman, or neither.
pub fn check_affine_projective_osserman(
    model: &AffineCurvatureModel,
    sampler: &DirectionSampler,
    n_samples: usize,
    cfg: &CheckConfig,
) -> Result<OssermanVerdict> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be at least 1"));
    }
    if sampler.dim != model.dim() {
        return Err(Error::invalid(
            "sampler dimension differs from model dimension",
        ));
    }
    let directions = sampler.take(n_samples);
    let evaluated = cfg.execution.map(&directions, |v| {
        let j = model.jacobi(v)?;
        JacobiSample::evaluate(v.clone(), None, j, &cfg.spectral)
    });
    let samples = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    decide(samples, cfg)
}
