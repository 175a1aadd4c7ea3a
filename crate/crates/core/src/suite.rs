//! Verification suites: named checks over the catalog (or a loaded file),
//! aggregated into a deterministic JSON report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::*;
use crate::connection::{AffineConnection, GeodesicOutcome};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::io::Document;
use crate::linalg::{power_traces, spectral_summary_with, SpectralOptions, SpectralSummary};
use crate::metric::{
    check_metric_projective_osserman, deformed_extension, modified_extension, pseudo_sphere_sample,
    verify_spectrum_transfer, CotangentChartPoint, PseudoMetric,
};
use crate::model::{
    check_affine_projective_osserman, scaling_between, AffineCurvatureModel, CheckConfig,
    DirectionSampler, OssermanVerdict, VerdictKind,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every tolerance used by the suites; each can be overridden from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative distance between matched spectra and expected eigenvalues.
    pub check: f64,
    /// Relative threshold for classifying an eigenvalue as zero.
    pub zero: f64,
    /// Relative singular-value threshold for numerical rank.
    pub rank: f64,
    /// Relative threshold for a vanishing power trace.
    pub trace: f64,
    /// Componentwise agreement of exactly known tensors.
    pub exact: f64,
    /// Relative tolerance for trace and Ricci identities and catalog spectra.
    pub property: f64,
    /// Fixed RK4 step for geodesics.
    pub geodesic_dt: f64,
    /// Velocity norm treated as blow-up.
    pub blowup_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            check: 1e-6,
            zero: 1e-7,
            rank: 1e-9,
            trace: 1e-10,
            exact: 1e-12,
            property: 1e-8,
            geodesic_dt: 1e-4,
            blowup_threshold: 1e6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Overrides the per-check number of sampled directions.
    pub samples: Option<usize>,
    pub tol: Tolerances,
    pub execution: Execution,
}

impl SuiteOptions {
    fn spectral(&self) -> SpectralOptions {
        SpectralOptions {
            zero_tol: self.tol.zero,
            rank_tol: self.tol.rank,
        }
    }

    fn check_config(&self) -> CheckConfig {
        CheckConfig {
            tol: self.tol.check,
            spectral: self.spectral(),
            trace_tol: self.tol.trace,
            execution: self.execution,
        }
    }

    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default).max(1)
    }

    /// Independent deterministic stream per check.
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn sub_seed(&self, salt: u64) -> u64 {
        self.rng(salt).gen()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    AffinePosserman,
    CatalogSpectra,
    ExtensionNilpotent,
    ExtensionSpectrum,
    GeodesicBlowup,
    Jordan,
    MetricPosserman,
    ModelValidate,
    NablaR,
    OddDimension,
    Ricci,
    TraceRelations,
    Transfer,
}

impl CheckName {
    pub const ALL: [CheckName; 13] = [
        CheckName::AffinePosserman,
        CheckName::CatalogSpectra,
        CheckName::ExtensionNilpotent,
        CheckName::ExtensionSpectrum,
        CheckName::GeodesicBlowup,
        CheckName::Jordan,
        CheckName::MetricPosserman,
        CheckName::ModelValidate,
        CheckName::NablaR,
        CheckName::OddDimension,
        CheckName::Ricci,
        CheckName::TraceRelations,
        CheckName::Transfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::AffinePosserman => "affine-posserman",
            CheckName::CatalogSpectra => "catalog-spectra",
            CheckName::ExtensionNilpotent => "extension-nilpotent",
            CheckName::ExtensionSpectrum => "extension-spectrum",
            CheckName::GeodesicBlowup => "geodesic-blowup",
            CheckName::Jordan => "jordan",
            CheckName::MetricPosserman => "metric-posserman",
            CheckName::ModelValidate => "model-validate",
            CheckName::NablaR => "nabla-R",
            CheckName::OddDimension => "odd-dimension",
            CheckName::Ricci => "ricci",
            CheckName::TraceRelations => "trace-relations",
            CheckName::Transfer => "transfer",
        }
    }

    fn salt(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
                Error::Usage(format!(
                    "unknown check '{s}'; known checks: all, {}",
                    known.join(", ")
                ))
            })
    }
}

/// Parses a suite descriptor: `all`, or a comma-separated list of check names.
pub fn parse_suite(descriptor: &str) -> Result<Vec<CheckName>> {
    let mut out = Vec::new();
    for part in descriptor
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
    {
        if part == "all" {
            out.extend(CheckName::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::Usage("empty suite descriptor".into()));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub details: Value,
    pub tolerance: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    pub id: String,
    pub parameters: BTreeMap<String, Value>,
}

/// Deterministic for fixed subject, seed and tolerances: checks are sorted by
/// name and no timing or host data is recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: Subject,
    pub checks: Vec<CheckResult>,
    pub seed: u64,
    pub tool_version: String,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report always serializes");
        s.push('\n');
        s
    }

    /// Human-readable summary rendered from the JSON form.
    pub fn render_text(&self) -> String {
        let v: Value = serde_json::from_str(&self.to_json()).expect("round trip");
        let mut out = format!(
            "subject: {}  seed: {}  version: {}\n",
            v["subject"]["id"].as_str().unwrap_or("?"),
            v["seed"],
            v["tool_version"].as_str().unwrap_or("?")
        );
        for c in v["checks"].as_array().into_iter().flatten() {
            out.push_str(&format!(
                "  {:<20} {:<5}  samples={} tol={}\n",
                c["name"].as_str().unwrap_or("?"),
                c["status"].as_str().unwrap_or("?"),
                c["samples"],
                c["tolerance"]
            ));
            if let Some(msg) = c["details"].get("message").and_then(Value::as_str) {
                out.push_str(&format!("      {msg}\n"));
            }
        }
        out.push_str(if v["passed"].as_bool() == Some(true) {
            "result: pass\n"
        } else {
            "result: FAIL\n"
        });
        out
    }
}

struct Outcome {
    passed: bool,
    details: Value,
    tolerance: f64,
    samples: usize,
}

fn finish(name: &str, r: Result<Outcome>) -> CheckResult {
    match r {
        Ok(o) => CheckResult {
            name: name.to_string(),
            status: if o.passed { Status::Pass } else { Status::Fail },
            details: o.details,
            tolerance: o.tolerance,
            samples: o.samples,
        },
        Err(e) => CheckResult {
            name: name.to_string(),
            status: Status::Error,
            details: json!({ "message": e.to_string() }),
            tolerance: 0.0,
            samples: 0,
        },
    }
}

fn assemble(subject: Subject, mut checks: Vec<CheckResult>, seed: u64) -> VerificationReport {
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().all(|c| c.status == Status::Pass);
    VerificationReport {
        subject,
        checks,
        seed,
        tool_version: TOOL_VERSION.to_string(),
        passed,
    }
}

/// Runs the named catalog checks.
pub fn run_suite(checks: &[CheckName], opts: &SuiteOptions) -> VerificationReport {
    let results = opts
        .execution
        .map(checks, |&c| finish(c.as_str(), run_check(c, opts)));
    let mut parameters = BTreeMap::new();
    parameters.insert(
        "checks".to_string(),
        json!(checks.iter().map(|c| c.as_str()).collect::<Vec<_>>()),
    );
    parameters.insert("samples".to_string(), json!(opts.samples));
    parameters.insert("tolerances".to_string(), json!(opts.tol));
    assemble(
        Subject {
            id: "catalog".into(),
            parameters,
        },
        results,
        opts.seed,
    )
}

fn run_check(c: CheckName, o: &SuiteOptions) -> Result<Outcome> {
    match c {
        CheckName::AffinePosserman => affine_posserman(o),
        CheckName::CatalogSpectra => catalog_spectra(o),
        CheckName::ExtensionNilpotent => extension_nilpotent(o),
        CheckName::ExtensionSpectrum => extension_spectrum(o),
        CheckName::GeodesicBlowup => geodesic_blowup(o),
        CheckName::Jordan => jordan(o),
        CheckName::MetricPosserman => metric_posserman(o),
        CheckName::ModelValidate => model_validate(o),
        CheckName::NablaR => nabla_r(o),
        CheckName::OddDimension => odd_dimension(o),
        CheckName::Ricci => ricci(o),
        CheckName::TraceRelations => trace_relations(o),
        CheckName::Transfer => transfer(o),
    }
}

// ---------------------------------------------------------------- helpers

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Compares a spectrum with an expected real multiset `(value, multiplicity)`:
/// sorted entrywise distance and per-value algebraic multiplicities.
/// Returns the largest eigenvalue error (infinite on a multiplicity mismatch).
pub fn spectrum_error(s: &SpectralSummary, want: &[(f64, usize)], tol: f64) -> f64 {
    let mut expected: Vec<f64> = want
        .iter()
        .flat_map(|&(v, k)| std::iter::repeat_n(v, k))
        .collect();
    expected.sort_by(f64::total_cmp);
    let got = s.expanded();
    if got.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for &v in &expected {
        match merged.last_mut() {
            Some((w, k)) if *w == v => *k += 1,
            _ => merged.push((v, 1)),
        }
    }
    let scale = 1.0 + s.spectral_radius();
    for (v, k) in merged {
        let found = s
            .entry_near(num_complex::Complex64::new(v, 0.0), tol.max(1e-6) * scale)
            .map_or(0, |e| e.alg_mult);
        if found != k {
            return f64::INFINITY;
        }
    }
    got.iter()
        .zip(&expected)
        .map(|(z, &w)| (z - num_complex::Complex64::new(w, 0.0)).norm())
        .fold(0.0, f64::max)
}

fn verdict_json(v: &OssermanVerdict) -> Value {
    json!({
        "kind": v.kind,
        "samples_used": v.samples_used,
        "witness": v.witness.as_ref().map(|w| json!({
            "direction": w.direction,
            "point": w.point,
            "spectrum": w.spectrum.expanded().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "reason": w.reason,
        })),
        "min_scale": v.scaling_samples.iter().map(|s| s.s).fold(f64::INFINITY, f64::min),
        "max_scale": v.scaling_samples.iter().map(|s| s.s).fold(0.0, f64::max),
    })
}

fn kind_str(k: VerdictKind) -> Value {
    serde_json::to_value(k).expect("enum serializes")
}

// ---------------------------------------------------------------- checks

fn model_validate(o: &SuiteOptions) -> Result<Outcome> {
    let mut items: Vec<(String, AffineCurvatureModel, bool)> = Vec::new();
    for m in 3..=5 {
        for eps in [0.0, 1.0, -2.0] {
            items.push((
                format!("m-eps m={m} eps={eps}"),
                build_m_eps_model(m, eps)?,
                true,
            ));
        }
    }
    for (mb, l0, l1, e) in [(2, 1.0, 1.0, 0.0), (3, 2.0, -0.5, 1.0)] {
        items.push((
            format!("complex mbar={mb} l0={l0} l1={l1} eps={e}"),
            build_complex_model(mb, l0, l1, e)?,
            true,
        ));
    }
    items.push((
        "quaternion k=2 eps=1".into(),
        build_quaternion_model(2, [1.0, 0.25, 0.5, 0.75], 1.0)?,
        true,
    ));
    items.push((
        "two-dimensional indefinite".into(),
        build_two_dimensional_model([[1.0, 0.0], [0.0, -1.0]]),
        true,
    ));
    let mut broken = AffineCurvatureModel::zeros(3);
    broken.set_antisymmetric(0, 1, 2, 0, 1.0);
    items.push((
        "negative control: A_{123}^1 = 1 alone".into(),
        broken,
        false,
    ));

    let mut passed = true;
    let mut rows = Vec::new();
    for (label, a, expect_valid) in &items {
        let d = a.validate_with_tol(o.tol.exact);
        passed &= d.is_valid() == *expect_valid;
        rows.push(json!({
            "item": label,
            "valid": d.is_valid(),
            "expected_valid": expect_valid,
            "violations": d.violations.iter().take(3).map(|v| json!({
                "identity": v.identity,
                "indices": v.indices.map(|i| i + 1),
                "residual": v.residual,
            })).collect::<Vec<_>>(),
        }));
    }
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: o.tol.exact,
        samples: items.len(),
    })
}

fn ricci(o: &SuiteOptions) -> Result<Outcome> {
    let mut passed = true;
    let mut rows = Vec::new();
    for m in 3..=5 {
        for eps in [0.0, 1.0, -2.0] {
            let r = build_m_eps_model(m, eps)?.ricci();
            let mut err: f64 = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let want = match (i, j) {
                        (0, 1) => eps,
                        (1, 0) => -eps,
                        _ if i == j => (m - 1) as f64,
                        _ => 0.0,
                    };
                    err = err.max((r.rho[i][j] - want).abs());
                }
            }
            passed &= err <= o.tol.exact;
            rows.push(json!({ "m": m, "eps": eps, "max_error": err }));
        }
    }
    let sym = build_complex_model(2, 1.0, 1.0, 0.0)?
        .ricci()
        .is_symmetric(o.tol.exact);
    let asym = !build_complex_model(2, 1.0, 1.0, 1.0)?
        .ricci()
        .is_symmetric(o.tol.exact);
    passed &= sym && asym;
    Ok(Outcome {
        passed,
        details: json!({
            "m_eps": rows,
            "complex_eps0_symmetric": sym,
            "complex_eps1_asymmetric": asym,
        }),
        tolerance: o.tol.exact,
        samples: rows.len() + 2,
    })
}

fn affine_posserman(o: &SuiteOptions) -> Result<Outcome> {
    let n = o.samples_or(200);
    let cfg = o.check_config();
    let seed = o.sub_seed(CheckName::AffinePosserman.salt());
    let mut rows = Vec::new();
    let mut passed = true;
    let mut total = 0;
    let mut record = |label: String, v: &OssermanVerdict, expect: VerdictKind, extra: bool| {
        let ok = v.kind == expect && extra;
        passed &= ok;
        total += v.samples_used;
        rows.push(json!({
            "item": label,
            "expected": kind_str(expect),
            "verdict": verdict_json(v),
            "ok": ok,
        }));
    };
    for m in 3..=5 {
        for eps in [0.0, 1.0] {
            let a = build_m_eps_model(m, eps)?;
            let v = check_affine_projective_osserman(&a, &DirectionSampler::new(m, seed), n, &cfg)?;
            let positive = v.scaling_samples.iter().all(|s| s.s > 0.0);
            record(
                format!("m-eps m={m} eps={eps}"),
                &v,
                VerdictKind::AffineProjectiveOsserman,
                positive,
            );
        }
    }
    let mut rng = o.rng(CheckName::AffinePosserman.salt());
    for (m, s) in [(3, 7), (4, 8)] {
        let c = build_nilpotent_connection(m, 2, s)?;
        let p = random_vec(&mut rng, m);
        let v = c.check_osserman_at(&p, &DirectionSampler::new(m, seed), n, &cfg)?;
        record(
            format!("nilpotent connection m={m} seed={s}"),
            &v,
            VerdictKind::AffineOsserman,
            true,
        );
    }
    let flat = AffineConnection::flat(3).check_osserman_at(
        &[0.0; 3],
        &DirectionSampler::new(3, seed),
        n,
        &cfg,
    )?;
    record(
        "flat connection".into(),
        &flat,
        VerdictKind::AffineOsserman,
        true,
    );

    let definite = build_two_dimensional_model([[1.0, 0.5], [-0.5, 2.0]]);
    let v = check_affine_projective_osserman(&definite, &DirectionSampler::new(2, seed), n, &cfg)?;
    record(
        "two-dimensional definite".into(),
        &v,
        VerdictKind::AffineProjectiveOsserman,
        true,
    );

    let indefinite = build_two_dimensional_model([[1.0, 0.0], [0.0, -1.0]]);
    let v =
        check_affine_projective_osserman(&indefinite, &DirectionSampler::new(2, seed), n, &cfg)?;
    let null_witness = v.witness.as_ref().is_some_and(|w| {
        let r = indefinite.ricci();
        let d = &w.direction;
        let q: f64 = (0..2)
            .map(|i| (0..2).map(|j| r.rho_sym[i][j] * d[i] * d[j]).sum::<f64>())
            .sum();
        q.abs() <= o.tol.property * d.iter().map(|x| x * x).sum::<f64>()
    });
    record(
        "two-dimensional indefinite".into(),
        &v,
        VerdictKind::Neither,
        null_witness,
    );

    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: o.tol.check,
        samples: total,
    })
}

fn nilpotent_bases(o: &SuiteOptions) -> Result<Vec<(usize, u64, AffineConnection)>> {
    let mut out = Vec::new();
    for m in [2, 3] {
        for s in 1..=3u64 {
            let seed = o.seed.wrapping_mul(31).wrapping_add(s);
            out.push((m, seed, build_nilpotent_connection(m, 2, seed)?));
        }
    }
    Ok(out)
}

fn extension_spectrum(o: &SuiteOptions) -> Result<Outcome> {
    let n = o.samples_or(50);
    let spectral = o.spectral();
    let mut rng = o.rng(CheckName::ExtensionSpectrum.salt());
    let mut passed = true;
    let mut rows = Vec::new();
    let mut total = 0;
    for (m, seed, base) in nilpotent_bases(o)? {
        let g = modified_extension(&base);
        let p = random_vec(&mut rng, 2 * m);
        let r = g.curvature_at(&p)?;
        for sign in [1, -1] {
            let sg = sign as f64;
            let want = [(0.0, 1), (sg, 1), (0.25 * sg, 2 * m - 2)];
            let dirs = pseudo_sphere_sample(&g, &p, sign, n, rng.gen())?;
            let errs = o.execution.map(&dirs, |d| -> Result<f64> {
                let s = spectral_summary_with(&r.jacobi(d)?, &spectral)?;
                Ok(spectrum_error(&s, &want, o.tol.check))
            });
            let worst = errs
                .into_iter()
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let ok = worst <= o.tol.check;
            passed &= ok;
            total += dirs.len();
            rows.push(json!({
                "m": m, "seed": seed, "sign": sign,
                "expected": want.iter().map(|&(v, k)| json!([v, k])).collect::<Vec<_>>(),
                "max_error": if worst.is_finite() { json!(worst) } else { json!("multiplicity mismatch") },
                "ok": ok,
            }));
        }
    }
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: o.tol.check,
        samples: total,
    })
}

fn extension_nilpotent(o: &SuiteOptions) -> Result<Outcome> {
    let n = o.samples_or(50);
    let cfg = o.check_config();
    let mut rng = o.rng(CheckName::ExtensionNilpotent.salt());
    let mut passed = true;
    let mut rows = Vec::new();
    let mut total = 0;
    for (m, seed, base) in nilpotent_bases(o)? {
        for phi_seed in 0..3u64 {
            let phi = random_symmetric_tensor(m, 1, seed.wrapping_mul(7).wrapping_add(phi_seed));
            let g = deformed_extension(&base, &phi)?;
            let p = random_vec(&mut rng, 2 * m);
            for sign in [1, -1] {
                let rep = check_metric_projective_osserman(
                    &g,
                    std::slice::from_ref(&p),
                    sign,
                    n,
                    rng.gen(),
                    &cfg,
                )?;
                let ok = rep.verdict.kind == VerdictKind::AffineOsserman;
                passed &= ok;
                total += rep.verdict.samples_used;
                rows.push(json!({
                    "m": m, "seed": seed, "phi_seed": phi_seed, "sign": sign,
                    "verdict": kind_str(rep.verdict.kind), "ok": ok,
                }));
            }
        }
    }
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: o.tol.zero,
        samples: total,
    })
}

fn transfer(o: &SuiteOptions) -> Result<Outcome> {
    let n = o.samples_or(50);
    let spectral = o.spectral();
    let mut rng = o.rng(CheckName::Transfer.salt());
    let mut passed = true;
    let mut rows = Vec::new();
    let mut total = 0;
    for eps in [0.0, 1.0] {
        let c = build_m_eps_connection(3, eps)?;
        let phi = random_symmetric_tensor(3, 1, rng.gen());
        let cases: Vec<(CotangentChartPoint, Vec<f64>)> = (0..n)
            .map(|_| {
                let p = CotangentChartPoint::new(random_vec(&mut rng, 3), random_vec(&mut rng, 3))
                    .expect("equal lengths");
                (p, random_vec(&mut rng, 6))
            })
            .collect();
        let reports = o.execution.map(&cases, |(p, xi)| {
            verify_spectrum_transfer(&c, &phi, p, xi, o.tol.check, &spectral)
        });
        let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
        let failures = reports.iter().filter(|r| !r.passed).count();
        let worst = reports
            .iter()
            .map(|r| r.max_eigenvalue_error)
            .fold(0.0, f64::max);
        let block = reports.iter().map(|r| r.block_residual).fold(0.0, f64::max);
        passed &= failures == 0;
        total += reports.len();
        rows.push(json!({
            "m": 3, "eps": eps, "cases": reports.len(), "failures": failures,
            "max_eigenvalue_error": worst, "max_block_residual": block,
        }));
    }
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: o.tol.check,
        samples: total,
    })
}

type JordanCase<L> = (L, AffineCurvatureModel, f64, Vec<f64>, Vec<f64>);

fn jordan(o: &SuiteOptions) -> Result<Outcome> {
    let spectral = o.spectral();
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut rows = Vec::new();
    let mut passed = true;
    // (label, model, eigenvalue, defective direction, diagonalizable direction)
    let cases: Vec<JordanCase<String>> = vec![
        (
            "m-eps m=3 eps=1".into(),
            build_m_eps_model(3, 1.0)?,
            1.0,
            vec![s2, 0.0, s2],
            vec![0.0, 0.0, 1.0],
        ),
        (
            "complex mbar=2 l0=1 l1=1 eps=1".into(),
            build_complex_model(2, 1.0, 1.0, 1.0)?,
            1.0,
            vec![s2, 0.0, s2, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ),
    ];
    for (label, a, lambda, x_def, x_diag) in cases {
        let sd = spectral_summary_with(&a.jacobi(&x_def)?, &spectral)?;
        let e = sd.entry_near(
            num_complex::Complex64::new(lambda, 0.0),
            o.tol.check * (1.0 + sd.spectral_radius()),
        );
        let defective = e.is_some_and(|e| e.geom_mult + 1 == e.alg_mult);
        let sn = spectral_summary_with(&a.jacobi(&x_diag)?, &spectral)?;
        let diag = sn.is_diagonalizable();
        passed &= defective && diag;
        rows.push(json!({
            "item": label,
            "eigenvalue": lambda,
            "defective_direction": x_def,
            "alg_mult": e.map(|e| e.alg_mult),
            "geom_mult": e.map(|e| e.geom_mult),
            "diagonalizable_direction": x_diag,
            "diagonalizable": diag,
        }));
    }
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: o.tol.rank,
        samples: 4,
    })
}

fn nabla_r(o: &SuiteOptions) -> Result<Outcome> {
    let mut rng = o.rng(CheckName::NablaR.salt());
    let n = o.samples_or(10);
    let tol = o.tol.property.min(1e-10);
    let mut passed = true;
    let mut rows = Vec::new();
    for m in 3..=5 {
        let c = build_m_eps_connection(m, 0.0)?;
        let last = m - 1;
        let p = random_vec(&mut rng, m);
        // ∇_{∂_m} R(∂_m, ∂_1) ∂_1 = −2 ∂_m
        let a = c.covariant_derivative_r_at(&p, last, 0, 0, last)?;
        // ∇_{∂_1} R(∂_m, ∂_1) ∂_1 = 2 ∂_1
        let b = c.covariant_derivative_r_at(&p, last, 0, 0, 0)?;
        let mut ea: Vec<f64> = vec![0.0; m];
        ea[last] = -2.0;
        let mut eb: Vec<f64> = vec![0.0; m];
        eb[0] = 2.0;
        let err_a = a
            .iter()
            .zip(&ea)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let err_b = b
            .iter()
            .zip(&eb)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        passed &= err_a <= tol && err_b <= tol;
        rows.push(json!({
            "m": m, "eps": 0.0,
            "nabla_m_R(m,1)1": a, "error": err_a,
            "nabla_1_R(m,1)1": b, "error_d1": err_b,
        }));
    }
    let mut worst: f64 = 0.0;
    for m in [3, 4] {
        for eps in [1.0, -2.0] {
            let c = build_m_eps_connection(m, eps)?;
            for _ in 0..n {
                let p: Vec<f64> = random_vec(&mut rng, m).iter().map(|x| 2.0 * x).collect();
                let v = c.covariant_derivative_r_at(&p, 1, 0, 0, 0)?;
                let want = -2.0 * eps * (p[0] + p[1]);
                worst = worst.max((v[1] - want).abs());
            }
        }
    }
    passed &= worst <= tol;
    rows.push(json!({
        "item": "nabla_1 R(2,1)1, slot 2 = -2 eps (x1 + x2)",
        "m": [3, 4], "eps": [1.0, -2.0], "points": n, "max_error": worst,
    }));
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: tol,
        samples: 3 + 4 * n,
    })
}

fn geodesic_blowup(o: &SuiteOptions) -> Result<Outcome> {
    let m = 3;
    let c = build_m_eps_connection(m, 0.0)?;
    let dt = o.tol.geodesic_dt;
    let mut v0 = vec![0.0; m];
    v0[m - 1] = -1.0;
    let down = c.geodesic_integrate(&vec![0.0; m], &v0, 2.0, dt, o.tol.blowup_threshold)?;
    // Along the last coordinate the equation is ẍ + Γ_mm^m ẋ² = 0 with
    // Γ_mm^m = 2, so ẋ(t) = ẋ₀ / (1 + 2ẋ₀ t) and the pole sits at 1 / (2|ẋ₀|).
    let pole = 0.5;
    let t_blow = match down.outcome {
        GeodesicOutcome::BlewUpAt { t } => Some(t),
        GeodesicOutcome::Completed => None,
    };
    let blow_ok = t_blow.is_some_and(|t| (t - pole).abs() <= 10.0 * dt);
    v0[m - 1] = 1.0;
    let up = c.geodesic_integrate(&vec![0.0; m], &v0, 1.0, dt, o.tol.blowup_threshold)?;
    let end = up.trajectory.last().expect("non-empty trajectory");
    let up_err = (end.v[m - 1] - 1.0 / 3.0).abs();
    let up_ok = up.outcome == GeodesicOutcome::Completed && up_err <= 1e-8;
    Ok(Outcome {
        passed: blow_ok && up_ok,
        details: json!({
            "backward": {
                "initial_velocity": -1.0,
                "outcome": down.outcome,
                "closed_form_pole": pole,
                "within_window_0.95_1.0": t_blow.is_some_and(|t| (0.95..=1.0).contains(&t)),
                "ok": blow_ok,
            },
            "forward": {
                "initial_velocity": 1.0,
                "outcome": up.outcome,
                "final_velocity": end.v[m - 1],
                "closed_form_final_velocity": 1.0 / 3.0,
                "ok": up_ok,
            },
            "dt": dt,
            "blowup_threshold": o.tol.blowup_threshold,
        }),
        tolerance: 10.0 * dt,
        samples: 2,
    })
}

fn metric_posserman(o: &SuiteOptions) -> Result<Outcome> {
    let n = o.samples_or(100);
    let cfg = o.check_config();
    let mut rng = o.rng(CheckName::MetricPosserman.salt());
    let mut passed = true;
    let mut rows = Vec::new();
    let mut total = 0;
    for (p, q) in [(1, 2), (2, 2), (2, 3)] {
        let g = build_product_sphere_metric(p, q)?;
        let pts: Vec<Vec<f64>> = (0..2).map(|_| random_vec(&mut rng, p + q)).collect();
        let space = check_metric_projective_osserman(&g, &pts, 1, n, rng.gen(), &cfg)?;
        let time = check_metric_projective_osserman(&g, &pts, -1, n, rng.gen(), &cfg)?;
        let witness_ok = time.verdict.witness.as_ref().is_some_and(|w| {
            w.spectrum.is_nilpotent()
                && w.direction[p..].iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-8
        });
        let ok = space.verdict.kind == VerdictKind::AffineProjectiveOsserman
            && time.verdict.kind == VerdictKind::Neither
            && witness_ok;
        passed &= ok;
        total += space.verdict.samples_used + time.verdict.samples_used;
        rows.push(json!({
            "item": format!("product p={p} q={q}"),
            "spacelike": verdict_json(&space.verdict),
            "timelike": verdict_json(&time.verdict),
            "expected": { "spacelike": "affine-projective-osserman", "timelike": "neither" },
            "ok": ok,
        }));
    }
    for eps in [0.0, 1.0] {
        let c = build_m_eps_connection(3, eps)?;
        for phi_seed in 0..2u64 {
            let phi = random_symmetric_tensor(3, 1, o.seed.wrapping_add(phi_seed));
            let g = deformed_extension(&c, &phi)?;
            let x = random_vec(&mut rng, 3);
            let y = random_vec(&mut rng, 3);
            let pt: Vec<f64> = x.iter().chain(&y).copied().collect();
            let affine = c.check_osserman_at(&x, &DirectionSampler::new(3, rng.gen()), n, &cfg)?;
            let space = check_metric_projective_osserman(
                &g,
                std::slice::from_ref(&pt),
                1,
                n,
                rng.gen(),
                &cfg,
            )?;
            let time = check_metric_projective_osserman(&g, &[pt], -1, n, rng.gen(), &cfg)?;
            let agree =
                affine.kind == space.verdict.kind && space.verdict.kind == time.verdict.kind;
            let ok = agree && affine.kind == VerdictKind::AffineProjectiveOsserman;
            passed &= ok;
            total += affine.samples_used + space.verdict.samples_used + time.verdict.samples_used;
            rows.push(json!({
                "item": format!("deformed extension of m-eps m=3 eps={eps} phi_seed={phi_seed}"),
                "affine": kind_str(affine.kind),
                "spacelike": kind_str(space.verdict.kind),
                "timelike": kind_str(time.verdict.kind),
                "agree": agree,
                "ok": ok,
            }));
        }
    }
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: o.tol.check,
        samples: total,
    })
}

fn catalog_spectra(o: &SuiteOptions) -> Result<Outcome> {
    let n = o.samples_or(200);
    let spectral = o.spectral();
    let tol = o.tol.property;
    let seed = o.sub_seed(CheckName::CatalogSpectra.salt());
    let mut passed = true;
    let mut rows = Vec::new();
    let mut total = 0;
    let mut run = |label: String,
                   a: &AffineCurvatureModel,
                   want: Vec<(f64, usize)>|
     -> Result<()> {
        let dirs: Vec<Vec<f64>> = DirectionSampler::new(a.dim(), seed)
            .take(n)
            .iter()
            .map(|d| unit(d))
            .collect();
        let errs = o.execution.map(&dirs, |d| -> Result<f64> {
            Ok(spectrum_error(
                &spectral_summary_with(&a.jacobi(d)?, &spectral)?,
                &want,
                tol,
            ))
        });
        let worst = errs
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let ok = worst <= tol;
        passed &= ok;
        total += dirs.len();
        rows.push(json!({
            "item": label,
            "expected": want.iter().map(|&(v, k)| json!([v, k])).collect::<Vec<_>>(),
            "max_error": if worst.is_finite() { json!(worst) } else { json!("multiplicity mismatch") },
            "ok": ok,
        }));
        Ok(())
    };
    for m in 3..=5 {
        for eps in [0.0, 1.0, -2.0] {
            run(
                format!("m-eps m={m} eps={eps}"),
                &build_m_eps_model(m, eps)?,
                vec![(0.0, 1), (1.0, m - 1)],
            )?;
        }
    }
    for mb in [2, 3] {
        for (l0, l1, e) in [(1.0, 1.0, 0.0), (2.0, -0.5, 0.0), (1.0, 0.25, 1.0)] {
            let m = 2 * mb;
            let mut want = vec![(0.0, 1), (l0 + 3.0 * l1, 1)];
            want.push((l0, m - 2));
            run(
                format!("complex mbar={mb} l0={l0} l1={l1} eps={e}"),
                &build_complex_model(mb, l0, l1, e)?,
                want,
            )?;
        }
    }
    for (lam, e) in [
        ([1.0, 1.0, 1.0, 1.0], 0.0),
        ([1.0, 0.25, 0.5, 0.75], 0.0),
        ([1.0, 0.25, 0.5, 0.75], 1.0),
    ] {
        let mut want = vec![(0.0, 1), (lam[0], 4)];
        for &li in &lam[1..] {
            let v = lam[0] + 3.0 * li;
            match want.iter_mut().find(|(w, _)| *w == v) {
                Some(entry) => entry.1 += 1,
                None => want.push((v, 1)),
            }
        }
        run(
            format!("quaternion k=2 lambda={lam:?} eps={e}"),
            &build_quaternion_model(2, lam, e)?,
            want,
        )?;
    }
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: tol,
        samples: total,
    })
}

fn projective_catalog() -> Result<Vec<(String, AffineCurvatureModel)>> {
    let mut out = Vec::new();
    for m in 3..=5 {
        for eps in [0.0, 1.0] {
            out.push((format!("m-eps m={m} eps={eps}"), build_m_eps_model(m, eps)?));
        }
    }
    out.push((
        "complex mbar=2 l0=1 l1=1 eps=0".into(),
        build_complex_model(2, 1.0, 1.0, 0.0)?,
    ));
    out.push((
        "quaternion k=2 lambda=1 eps=0".into(),
        build_quaternion_model(2, [1.0; 4], 0.0)?,
    ));
    out.push((
        "two-dimensional definite".into(),
        build_two_dimensional_model([[1.0, 0.5], [-0.5, 2.0]]),
    ));
    Ok(out)
}

fn trace_relations(o: &SuiteOptions) -> Result<Outcome> {
    let n = o.samples_or(100);
    let tol = o.tol.property;
    let mut rng = o.rng(CheckName::TraceRelations.salt());
    let mut passed = true;
    let mut rows = Vec::new();
    for (label, a) in projective_catalog()? {
        let m = a.dim();
        let triples: Vec<[Vec<f64>; 3]> = (0..n)
            .map(|_| {
                [
                    random_vec(&mut rng, m),
                    random_vec(&mut rng, m),
                    random_vec(&mut rng, m),
                ]
            })
            .collect();
        let res = o
            .execution
            .map(&triples, |[x, y, z]| -> Result<(f64, f64, bool)> {
                let (jx, jy, jz) = (a.jacobi(x)?, a.jacobi(y)?, a.jacobi(z)?);
                let tx = power_traces(&jx, m)?;
                let ty = power_traces(&jy, m)?;
                let mut worst: f64 = 0.0;
                for k in 1..=m {
                    let lhs = tx[k - 1] * ty[0].powi(k as i32);
                    let rhs = tx[0].powi(k as i32) * ty[k - 1];
                    worst = worst
                        .max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE));
                }
                let sxy = scaling_between(&jx, &jy, m, o.tol.trace)?.s;
                let syz = scaling_between(&jy, &jz, m, o.tol.trace)?.s;
                let sxz = scaling_between(&jx, &jz, m, o.tol.trace)?.s;
                let positive = sxy > 0.0 && syz > 0.0 && sxz > 0.0;
                Ok((worst, (sxy * syz / sxz - 1.0).abs(), positive))
            });
        let res = res.into_iter().collect::<Result<Vec<_>>>()?;
        let trace_err = res.iter().map(|r| r.0).fold(0.0, f64::max);
        let cocycle_err = res.iter().map(|r| r.1).fold(0.0, f64::max);
        let positive = res.iter().all(|r| r.2);
        let ok = trace_err <= tol && cocycle_err <= tol && positive;
        passed &= ok;
        rows.push(json!({
            "item": label,
            "pairs": n,
            "max_trace_relation_error": trace_err,
            "max_cocycle_error": cocycle_err,
            "scales_positive": positive,
            "ok": ok,
        }));
    }
    let count = rows.len() * n;
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: tol,
        samples: count,
    })
}

fn odd_dimension(o: &SuiteOptions) -> Result<Outcome> {
    let n = o.samples_or(200);
    let spectral = o.spectral();
    let tol = o.tol.property;
    let seed = o.sub_seed(CheckName::OddDimension.salt());
    let mut passed = true;
    let mut rows = Vec::new();
    let mut total = 0;
    for m in [3, 5] {
        for eps in [0.0, 1.0, -2.0] {
            let a = build_m_eps_model(m, eps)?;
            let r = a.ricci();
            let dirs = DirectionSampler::new(m, seed).take(n);
            let res = o.execution.map(&dirs, |v| -> Result<(bool, f64)> {
                let s = spectral_summary_with(&a.jacobi(v)?, &spectral)?;
                let shape = s.entries.len() == 2
                    && s.entries[0].eigenvalue.norm() == 0.0
                    && s.entries[0].alg_mult == 1
                    && s.entries[1].alg_mult == m - 1
                    && s.entries[1].eigenvalue.im == 0.0;
                let lambda = s.entries.last().map_or(0.0, |e| e.eigenvalue.re);
                let rvv = r.eval(v, v);
                let err = (rvv - (m - 1) as f64 * lambda).abs() / rvv.abs().max(1.0);
                Ok((shape, err))
            });
            let res = res.into_iter().collect::<Result<Vec<_>>>()?;
            let shape = res.iter().all(|r| r.0);
            let err = res.iter().map(|r| r.1).fold(0.0, f64::max);
            let ok = shape && err <= tol;
            passed &= ok;
            total += res.len();
            rows.push(json!({
                "m": m, "eps": eps, "spectrum_shape_ok": shape, "max_ricci_error": err, "ok": ok,
            }));
        }
    }
    Ok(Outcome {
        passed,
        details: json!({ "items": rows }),
        tolerance: tol,
        samples: total,
    })
}

// ---------------------------------------------------------------- files

/// Checks for a loaded document. Models are validated and run through the
/// affine checker; connections are checked for curvature symmetries and
/// Osserman behaviour at sampled points; metrics get both sign checks.
pub fn run_file_suite(subject: &str, doc: &Document, opts: &SuiteOptions) -> VerificationReport {
    let mut results = Vec::new();
    let cfg = opts.check_config();
    let n = opts.samples_or(100);
    let mut rng = opts.rng(0xF11E);
    match doc {
        Document::Model(a) => {
            let d = a.validate_with_tol(opts.tol.exact);
            results.push(finish(
                "model-validate",
                Ok(Outcome {
                    passed: d.is_valid(),
                    details: json!({
                        "violations": d.violations.len(),
                        "first": d.violations.iter().take(10).map(|v| json!({
                            "identity": v.identity,
                            "indices": v.indices.map(|i| i + 1),
                            "residual": v.residual,
                        })).collect::<Vec<_>>(),
                    }),
                    tolerance: opts.tol.exact,
                    samples: a.dim().pow(4),
                }),
            ));
            if d.is_valid() {
                let r = check_affine_projective_osserman(
                    a,
                    &DirectionSampler::new(a.dim(), opts.seed),
                    n,
                    &cfg,
                )
                .map(|v| Outcome {
                    passed: v.kind != VerdictKind::Neither,
                    details: verdict_json(&v),
                    tolerance: cfg.tol,
                    samples: v.samples_used,
                });
                results.push(finish("affine-posserman", r));
            }
        }
        Document::Connection(c) => {
            let m = c.dim();
            let pts: Vec<Vec<f64>> = (0..5).map(|_| random_vec(&mut rng, m)).collect();
            let r = (|| {
                let mut worst: f64 = 0.0;
                for p in &pts {
                    let d = c.curvature_at(p)?.validate_with_tol(opts.tol.property);
                    worst = worst.max(d.violations.iter().map(|v| v.residual).fold(0.0, f64::max));
                }
                Ok(Outcome {
                    passed: worst == 0.0,
                    details: json!({ "points": pts, "max_residual_over_tolerance": worst }),
                    tolerance: opts.tol.property,
                    samples: pts.len(),
                })
            })();
            results.push(finish("model-validate", r));
            let r = (|| {
                let mut kinds = Vec::new();
                let mut total = 0;
                for p in &pts {
                    let v =
                        c.check_osserman_at(p, &DirectionSampler::new(m, opts.seed), n, &cfg)?;
                    total += v.samples_used;
                    kinds.push(v);
                }
                let first = kinds[0].kind;
                Ok(Outcome {
                    passed: kinds
                        .iter()
                        .all(|v| v.kind == first && v.kind != VerdictKind::Neither),
                    details: json!({ "per_point": kinds.iter().map(verdict_json).collect::<Vec<_>>() }),
                    tolerance: cfg.tol,
                    samples: total,
                })
            })();
            results.push(finish("affine-posserman", r));
        }
        Document::Metric(g) => {
            results.push(finish(
                "metric-posserman",
                metric_file_check(g, &mut rng, n, opts.seed, &cfg),
            ));
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("kind".to_string(), json!(doc.kind()));
    parameters.insert("samples".to_string(), json!(opts.samples));
    parameters.insert("tolerances".to_string(), json!(opts.tol));
    assemble(
        Subject {
            id: subject.to_string(),
            parameters,
        },
        results,
        opts.seed,
    )
}

fn metric_file_check(
    g: &PseudoMetric,
    rng: &mut ChaCha8Rng,
    n: usize,
    seed: u64,
    cfg: &CheckConfig,
) -> Result<Outcome> {
    let pts: Vec<Vec<f64>> = (0..2).map(|_| random_vec(rng, g.dim())).collect();
    let (neg, pos) = g.signature();
    let mut out = serde_json::Map::new();
    let mut total = 0;
    let mut passed = true;
    for (sign, label, attainable) in [(1, "spacelike", pos > 0), (-1, "timelike", neg > 0)] {
        if !attainable {
            out.insert(label.into(), json!("empty cone"));
            continue;
        }
        let rep = check_metric_projective_osserman(g, &pts, sign, n, seed, cfg)?;
        passed &= rep.verdict.kind != VerdictKind::Neither;
        total += rep.verdict.samples_used;
        out.insert(label.into(), verdict_json(&rep.verdict));
    }
    out.insert("points".into(), json!(pts));
    Ok(Outcome {
        passed,
        details: Value::Object(out),
        tolerance: cfg.tol,
        samples: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_parsing() {
        assert_eq!(parse_suite("all").unwrap().len(), CheckName::ALL.len());
        assert_eq!(
            parse_suite("ricci, jordan").unwrap(),
            vec![CheckName::Jordan, CheckName::Ricci]
        );
        assert!(matches!(parse_suite("bogus"), Err(Error::Usage(_))));
    }

    #[test]
    fn small_suite_passes_and_is_sorted() {
        let r = run_suite(
            &[CheckName::Ricci, CheckName::Jordan],
            &SuiteOptions::default(),
        );
        assert!(r.passed, "{}", r.to_json());
        assert_eq!(r.checks[0].name, "jordan");
        assert!(r.render_text().contains("result: pass"));
    }
}
