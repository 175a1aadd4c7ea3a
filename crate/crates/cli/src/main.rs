//! `osserman`: build catalog objects, validate files, run verification suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use osserman_core::catalog;
use osserman_core::exec::Execution;
use osserman_core::io::{self, Document};
use osserman_core::metric::{deformed_extension, modified_extension, SymmetricTwoTensor};
use osserman_core::suite::{parse_suite, run_file_suite, run_suite, SuiteOptions, Tolerances};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "osserman",
    version,
    about = "Curvature models, connections and extension metrics: build, validate, check"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a catalog object as JSON
    Build {
        #[command(subcommand)]
        item: BuildItem,
        /// Output file (stdout when omitted)
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Load a model, connection or metric file and report symmetry violations
    Validate { file: PathBuf },
    /// Run a verification suite: `all`, a comma-separated list of checks, or a file
    Check(CheckArgs),
}

#[derive(Subcommand)]
enum BuildItem {
    /// Perturbed constant-curvature model 𝔐_ε
    MEpsModel {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Connection realizing 𝔐_ε (dimension at least 3)
    MEpsConnection {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Random connection with strictly lower-triangular Christoffel support (nilpotent Jacobi operators)
    NilpotentConnection {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Complex-structure model λ₀A₀ + λ₁A_J + εℰ in dimension 2·mbar
    ComplexModel {
        #[arg(long)]
        mbar: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda0: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Quaternionic model in dimension 4k
    QuaternionModel {
        #[arg(long)]
        k: usize,
        /// λ₀,λ₁,λ₂,λ₃
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0, 1.0], allow_negative_numbers = true)]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Two-dimensional model with prescribed Ricci tensor (row-major ρ11,ρ12,ρ21,ρ22)
    TwoDimensionalModel {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        rho: Vec<f64>,
    },
    /// Flat ℝ^p (negative definite) times the stereographic round sphere S^q
    ProductSphereMetric {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Deformed extension metric of a connection file
    DeformedExtension {
        #[arg(long)]
        connection: PathBuf,
        /// Seed of a random symmetric tensor Φ; Φ = 0 when omitted
        #[arg(long)]
        phi_seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        phi_degree: u32,
    },
    /// Modified extension metric of a connection file
    ModifiedExtension {
        #[arg(long)]
        connection: PathBuf,
    },
}

#[derive(Args)]
struct CheckArgs {
    /// `all`, a comma-separated list of check names, or a JSON file
    suite: String,
    #[arg(long, env = "OSSERMAN_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of sampled directions per item (each check has its own default)
    #[arg(long)]
    samples: Option<usize>,
    /// Spectrum comparison tolerance (relative)
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    zero_tol: Option<f64>,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    trace_tol: Option<f64>,
    /// Componentwise tolerance for exactly known tensors
    #[arg(long)]
    exact_tol: Option<f64>,
    /// Tolerance for trace / Ricci identities and catalog spectra
    #[arg(long)]
    property_tol: Option<f64>,
    /// RK4 step for geodesics
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    blowup_threshold: Option<f64>,
    /// Run samples sequentially
    #[arg(long)]
    serial: bool,
    /// Write the JSON report here (`-` for stdout)
    #[arg(long)]
    json: Option<PathBuf>,
}

fn load(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse_document(&text).with_context(|| format!("loading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build(item: BuildItem) -> Result<Document> {
    Ok(match item {
        BuildItem::MEpsModel { dim, eps } => Document::Model(catalog::build_m_eps_model(dim, eps)?),
        BuildItem::MEpsConnection { dim, eps } => {
            Document::Connection(catalog::build_m_eps_connection(dim, eps)?)
        }
        BuildItem::NilpotentConnection { dim, degree, seed } => {
            Document::Connection(catalog::build_nilpotent_connection(dim, degree, seed)?)
        }
        BuildItem::ComplexModel {
            mbar,
            lambda0,
            lambda1,
            eps,
        } => Document::Model(catalog::build_complex_model(mbar, lambda0, lambda1, eps)?),
        BuildItem::QuaternionModel { k, lambda, eps } => {
            let l: [f64; 4] = lambda
                .try_into()
                .map_err(|_| anyhow::anyhow!("--lambda needs 4 values"))?;
            Document::Model(catalog::build_quaternion_model(k, l, eps)?)
        }
        BuildItem::TwoDimensionalModel { rho } => {
            anyhow::ensure!(rho.len() == 4, "--rho needs 4 values");
            Document::Model(catalog::build_two_dimensional_model([
                [rho[0], rho[1]],
                [rho[2], rho[3]],
            ]))
        }
        BuildItem::ProductSphereMetric { p, q } => {
            Document::Metric(catalog::build_product_sphere_metric(p, q)?)
        }
        BuildItem::DeformedExtension {
            connection,
            phi_seed,
            phi_degree,
        } => {
            let Document::Connection(c) = load(&connection)? else {
                anyhow::bail!("{} is not a connection file", connection.display())
            };
            let phi = match phi_seed {
                Some(s) => catalog::random_symmetric_tensor(c.dim(), phi_degree, s),
                None => SymmetricTwoTensor::zero(c.dim()),
            };
            Document::Metric(deformed_extension(&c, &phi)?)
        }
        BuildItem::ModifiedExtension { connection } => {
            let Document::Connection(c) = load(&connection)? else {
                anyhow::bail!("{} is not a connection file", connection.display())
            };
            Document::Metric(modified_extension(&c))
        }
    })
}

/// Structural validation of a loaded document; returns (valid, JSON summary).
fn validate(doc: &Document) -> Result<(bool, serde_json::Value)> {
    Ok(match doc {
        Document::Model(a) => {
            let d = a.validate();
            let v = d
                .violations
                .iter()
                .map(|v| json!({ "identity": v.identity, "indices": v.indices.map(|i| i + 1), "residual": v.residual }))
                .collect::<Vec<_>>();
            (
                d.is_valid(),
                json!({ "kind": "model", "dimension": a.dim(), "valid": d.is_valid(), "violations": v }),
            )
        }
        Document::Connection(c) => {
            let origin = vec![0.0; c.dim()];
            let d = c.curvature_at(&origin)?.validate_with_tol(1e-10);
            (
                d.is_valid(),
                json!({ "kind": "connection", "dimension": c.dim(), "torsion_free": true,
                        "curvature_at_origin_valid": d.is_valid(), "valid": d.is_valid() }),
            )
        }
        Document::Metric(g) => {
            let origin = vec![0.0; g.dim()];
            let (neg, pos) = g.signature();
            let error = g.value_at(&origin).err().map(|e| e.to_string());
            let ok = error.is_none();
            (
                ok,
                json!({ "kind": "metric", "dimension": g.dim(), "signature": [neg, pos], "symmetric": true,
                        "nondegenerate_with_declared_signature_at_origin": ok,
                        "error": error, "valid": ok }),
            )
        }
    })
}

fn options(a: &CheckArgs) -> SuiteOptions {
    let d = Tolerances::default();
    SuiteOptions {
        seed: a.seed,
        samples: a.samples,
        tol: Tolerances {
            check: a.tol.unwrap_or(d.check),
            zero: a.zero_tol.unwrap_or(d.zero),
            rank: a.rank_tol.unwrap_or(d.rank),
            trace: a.trace_tol.unwrap_or(d.trace),
            exact: a.exact_tol.unwrap_or(d.exact),
            property: a.property_tol.unwrap_or(d.property),
            geodesic_dt: a.dt.unwrap_or(d.geodesic_dt),
            blowup_threshold: a.blowup_threshold.unwrap_or(d.blowup_threshold),
        },
        execution: if a.serial {
            Execution::Serial
        } else {
            Execution::Parallel
        },
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build { item, out } => {
            let doc = build(item)?;
            let mut text = io::document_to_json(&doc);
            text.push('\n');
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Validate { file } => {
            let doc = load(&file)?;
            let (ok, summary) = validate(&doc)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(ok)
        }
        Command::Check(args) => {
            let opts = options(&args);
            let path = Path::new(&args.suite);
            let report = if path.is_file() {
                run_file_suite(&args.suite, &load(path)?, &opts)
            } else {
                run_suite(&parse_suite(&args.suite)?, &opts)
            };
            match args.json.as_deref() {
                Some(p) if p == Path::new("-") => print!("{}", report.to_json()),
                Some(p) => {
                    fs::write(p, report.to_json())
                        .with_context(|| format!("writing {}", p.display()))?;
                    print!("{}", report.render_text());
                }
                None => print!("{}", report.render_text()),
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
