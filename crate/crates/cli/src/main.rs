//! `ptx`: inspect and transform extension-algebra Poisson structures
//! described by JSON manifests.
//!
//! Exit codes: 0 when every requested check passes or the computation
//! succeeds, 1 when a mathematical check fails (residuals are
//! printed), 2 on usage or input errors.

mod spec_files;

use clap::{Parser, Subcommand};
use ptx_core::gauge::Exactness;
use ptx_core::manifest::{Manifest, ManifestError};
use ptx_core::parse::parse_element;
use ptx_core::poly::Rat;
use ptx_core::{DerivTensor, ExtElem, FiberElem, TripleData};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "ptx",
    version,
    about = "Exact checks and computations for Poisson structures on trivial extension algebras"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the base Jacobi identity, the structure conditions, and
    /// the generator Jacobiator of a manifest
    Check { manifest: PathBuf },
    /// Bracket of two extension elements, syntax "f ; a1,...,ak"
    Bracket {
        manifest: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Base Jacobi identity on generator triples
    Jacobi { manifest: PathBuf },
    /// Curvature on a pair of basis forms, applied to every basis
    /// vector (1-based indices)
    Curvature {
        manifest: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
    /// Rational basis of the Casimir elements up to a degree bound
    Casimir {
        manifest: PathBuf,
        #[arg(long = "max-degree")]
        max_degree: u32,
    },
    /// Rational basis of the fiber center up to a degree bound
    Center {
        manifest: PathBuf,
        #[arg(long = "max-degree")]
        max_degree: u32,
    },
    /// Graded cocycle/coboundary dimensions of the contravariant
    /// differential
    Cohomology {
        manifest: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        degree: u32,
        #[arg(long = "center-valued")]
        center_valued: bool,
    },
    /// Transport the structure through a gauge transformation
    Gauge {
        manifest: PathBuf,
        #[arg(long)]
        gauge: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Deform the K tensor by t times a closed center-valued cocycle
    Deform {
        manifest: PathBuf,
        #[arg(long)]
        cocycle: PathBuf,
        #[arg(long)]
        t: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Solve for a center-valued primitive of a rank-2 cocycle at
    /// bounded degree
    Exactness {
        manifest: PathBuf,
        #[arg(long)]
        cocycle: PathBuf,
        #[arg(long = "max-degree")]
        max_degree: u32,
    },
    /// Detect whether the structure is induced by a flat module action
    ModuleForm { manifest: PathBuf },
    /// Hamiltonian derivation of an element, in block form
    Ham {
        manifest: PathBuf,
        #[arg(long)]
        elem: String,
    },
    /// Check whether a block derivation is a Poisson derivation
    PoissCheck {
        manifest: PathBuf,
        #[arg(long)]
        derivation: PathBuf,
    },
}

/// Input-side failures: exit code 2.
#[derive(Debug, thiserror::Error)]
enum InputError {
    #[error("{0}")]
    Manifest(#[from] ManifestError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{what}: {msg}")]
    Bad { what: String, msg: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, InputError> {
    match cli.cmd {
        Cmd::Check { manifest } => {
            let (base, triple) = load(&manifest)?;
            let jacobi = base.jacobi_check();
            let conditions = triple.check();
            let jacobiator = triple.jacobiator_check();
            println!("{jacobi}");
            println!("{conditions}");
            println!("{jacobiator}");
            let ok = jacobi.passed() && conditions.passed() && jacobiator.passed();
            println!(
                "{}",
                if ok {
                    "all checks passed"
                } else {
                    "checks FAILED"
                }
            );
            Ok(ok)
        }
        Cmd::Bracket { manifest, lhs, rhs } => {
            let (m, _, triple) = load_with_manifest(&manifest)?;
            let p = element(&m, &triple, &lhs)?;
            let q = element(&m, &triple, &rhs)?;
            println!("{}", triple.ext_bracket(&p, &q));
            Ok(true)
        }
        Cmd::Jacobi { manifest } => {
            let (base, _) = load(&manifest)?;
            let report = base.jacobi_check();
            println!("{report}");
            Ok(report.passed())
        }
        Cmd::Curvature { manifest, i, j } => {
            let (_, triple) = load(&manifest)?;
            let n = triple.nvars();
            if i < 1 || i > n || j < 1 || j > n {
                return Err(InputError::Bad {
                    what: "curvature".into(),
                    msg: format!("indices must lie in 1..={n}"),
                });
            }
            let alpha = ptx_core::OneForm::dx(n, i - 1);
            let beta = ptx_core::OneForm::dx(n, j - 1);
            for a in 0..triple.fiber_rank() {
                let value =
                    triple.curvature(&alpha, &beta, &FiberElem::basis(n, triple.fiber_rank(), a));
                println!("Curv(dx{i},dx{j}) e{} = {}", a + 1, value);
            }
            Ok(true)
        }
        Cmd::Casimir {
            manifest,
            max_degree,
        } => {
            let (_, triple) = load(&manifest)?;
            let basis = triple.casimir_solve(max_degree);
            println!(
                "casimir basis up to degree {max_degree}: {} element(s)",
                basis.len()
            );
            for (idx, b) in basis.iter().enumerate() {
                println!("  {}: {}", idx + 1, b);
            }
            Ok(true)
        }
        Cmd::Center {
            manifest,
            max_degree,
        } => {
            let (_, triple) = load(&manifest)?;
            let basis = triple.center_basis(max_degree);
            println!(
                "center basis up to degree {max_degree}: {} element(s)",
                basis.len()
            );
            for (idx, b) in basis.iter().enumerate() {
                println!("  {}: {}", idx + 1, b);
            }
            Ok(true)
        }
        Cmd::Cohomology {
            manifest,
            rank,
            degree,
            center_valued,
        } => {
            let (_, triple) = load(&manifest)?;
            match triple.cohomology_dims(rank, degree, center_valued) {
                Ok((cocycles, coboundaries, h)) => {
                    println!(
                        "rank {rank}, degree {degree}{}: cocycles {cocycles}, coboundaries {coboundaries}, H = {h}",
                        if center_valued { ", center-valued" } else { "" }
                    );
                }
                Err(err) => {
                    let (cocycles, coboundaries) =
                        triple.filtered_dims(rank, degree, center_valued);
                    println!("{err}");
                    println!(
                        "filtered bounds within degree <= {degree}: cocycles {cocycles}, coboundaries {coboundaries} (filtration bounds, not graded cohomology)"
                    );
                }
            }
            Ok(true)
        }
        Cmd::Gauge {
            manifest,
            gauge,
            emit,
        } => {
            let (m, _, triple) = load_with_manifest(&manifest)?;
            let input_check = triple.check();
            if !input_check.passed() {
                println!("input structure is invalid:");
                println!("{input_check}");
                return Ok(false);
            }
            let g = spec_files::load_gauge(&gauge, &m, &triple)?;
            let transported = g.transport(&triple).map_err(|e| InputError::Bad {
                what: gauge.display().to_string(),
                msg: e.to_string(),
            })?;
            let report = transported.check();
            println!("{report}");
            if let Some(path) = emit {
                write_manifest(&path, &transported, "gauge transport output")?;
                println!("wrote {}", path.display());
            }
            Ok(report.passed())
        }
        Cmd::Deform {
            manifest,
            cocycle,
            t,
            emit,
        } => {
            let (m, _, triple) = load_with_manifest(&manifest)?;
            let input_check = triple.check();
            if !input_check.passed() {
                println!("input structure is invalid:");
                println!("{input_check}");
                return Ok(false);
            }
            let c = spec_files::load_cocycle_form(&cocycle, &m, &triple)?;
            let t = Rat::from_str(&t).map_err(|_| InputError::Bad {
                what: "--t".into(),
                msg: format!("{t:?} is not a rational"),
            })?;
            match triple.deform(&c, &t) {
                Ok(deformed) => {
                    let report = deformed.check();
                    println!("{report}");
                    if let Some(path) = emit {
                        write_manifest(&path, &deformed, "deformation output")?;
                        println!("wrote {}", path.display());
                    }
                    Ok(report.passed())
                }
                Err(err) => {
                    println!("deformation rejected: {err}");
                    Ok(false)
                }
            }
        }
        Cmd::Exactness {
            manifest,
            cocycle,
            max_degree,
        } => {
            let (m, _, triple) = load_with_manifest(&manifest)?;
            let target: DerivTensor =
                spec_files::load_cocycle_form(&cocycle, &m, &triple)?.to_deriv();
            match triple.exactness_solve(&target, max_degree) {
                Exactness::Found(q) => {
                    println!("primitive found:");
                    for i in 0..triple.nvars() {
                        println!("  Q(x{}) = {}", i + 1, q.entry(&[i]));
                    }
                    Ok(true)
                }
                Exactness::NoneCertified => {
                    println!(
                        "no primitive exists (certified: graded structure, window covers all degrees)"
                    );
                    Ok(false)
                }
                Exactness::NoneUpToDegree => {
                    println!(
                        "no primitive up to degree {max_degree} (inconclusive beyond this bound)"
                    );
                    Ok(false)
                }
            }
        }
        Cmd::ModuleForm { manifest } => {
            let (_, triple) = load(&manifest)?;
            let report = triple.module_form_check();
            println!("{report}");
            Ok(report.is_module_form() && report.axioms_pass())
        }
        Cmd::Ham { manifest, elem } => {
            let (m, _, triple) = load_with_manifest(&manifest)?;
            let p = element(&m, &triple, &elem)?;
            print!("{}", triple.hamiltonian(&p));
            Ok(true)
        }
        Cmd::PoissCheck {
            manifest,
            derivation,
        } => {
            let (m, _, triple) = load_with_manifest(&manifest)?;
            let x = spec_files::load_derivation(&derivation, &m, &triple)?;
            let report = triple.poisson_derivation_check(&x);
            if !report.precondition_passed() {
                return Err(InputError::Bad {
                    what: derivation.display().to_string(),
                    msg: format!(
                        "not a derivation of the commutative algebra:\n{}",
                        report.malformed
                    ),
                });
            }
            println!("{report}");
            Ok(report.is_poisson())
        }
    }
}

fn load(path: &Path) -> Result<(ptx_core::PoissonBase, TripleData), InputError> {
    Ok(ptx_core::manifest::load(path)?)
}

fn load_with_manifest(
    path: &Path,
) -> Result<(Manifest, ptx_core::PoissonBase, TripleData), InputError> {
    let m = Manifest::from_path(path)?;
    let (base, triple) = m.build()?;
    Ok((m, base, triple))
}

fn element(m: &Manifest, triple: &TripleData, src: &str) -> Result<ExtElem, InputError> {
    let symbols = m.symbols()?;
    let (f, coords) =
        parse_element(src, &symbols, triple.fiber_rank()).map_err(|e| InputError::Bad {
            what: format!("element {src:?}"),
            msg: e.to_string(),
        })?;
    Ok(ExtElem::new(f, FiberElem::new(triple.nvars(), coords)))
}

fn write_manifest(path: &Path, triple: &TripleData, meta: &str) -> Result<(), InputError> {
    let manifest = Manifest::from_structures(triple, meta);
    std::fs::write(path, manifest.to_json() + "\n").map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}
