//! Command-line entry point: parsing, analysis, volume optimization, and
//! certificate extraction wired into reproducible JSON reports.
//!
//! Exit codes: 0 success, 2 invalid input, 3 inadmissible curvature,
//! 4 no convergence, 5 solver budget exhausted.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use trivol::angles::{curvature_admissible, tas_basis, CurvatureAssignment, LatticeSearchOpts};
use trivol::outcomes::{
    cluster_detect, log_sine_vector, thurston_from_smooth, two_quad_certificate, verify_thurston,
};
use trivol::report::{
    CertificateJson, CertifyEntry, CertifyReport, CheckReport, ClusterJson, LogSineJson,
    OptimizeReport, ThurstonJson, Z2TautReport,
};
use trivol::tri::{parse_triangulation, Triangulation};
use trivol::volume::{maximize, CriticalReport, MaximizeOpts, PointKind, VolumeError};
use trivol::z2taut::{solve_z2_taut, Mode, SolveStatus};

const EXIT_INPUT: u8 = 2;
const EXIT_CURVATURE: u8 = 3;
const EXIT_CONVERGENCE: u8 = 4;
const EXIT_BUDGET: u8 = 5;

#[derive(Parser)]
#[command(
    name = "trivol",
    about = "Normal-surface and angle-structure analysis, volume maximization, \
             and certificate extraction on triangulated closed oriented pseudo 3-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Triangulation file (gluing description)
    #[arg(long)]
    input: PathBuf,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Curvature file (lines `edge <id> <p>/<q>`); defaults to k = 1
    #[arg(long)]
    curvature: Option<PathBuf>,
    /// Projected gradient norm below which a smooth point is critical
    #[arg(long, default_value_t = 1e-9)]
    grad_tol: f64,
    /// Flatness threshold on |sin theta|
    #[arg(long, default_value_t = 1e-7)]
    eps_flat: f64,
    /// Iteration cap per ascent run
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Number of multistart runs (seed 0 starts unperturbed)
    #[arg(long, default_value_t = 8)]
    multistart: usize,
    /// Random seed for the multistart perturbations
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// L1 bound for the lattice-offset search in the structure solver
    #[arg(long, default_value_t = 12)]
    lattice_l1: usize,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Only certify this quad id (3 * tet + index); default: all quads
    #[arg(long)]
    quad: Option<usize>,
}

#[derive(Args)]
struct Z2Args {
    #[command(flatten)]
    common: CommonArgs,
    /// first: stop at the first solution; all: enumerate
    #[arg(long, default_value = "all")]
    mode: String,
    /// Branch-node budget for the solver
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the input and report counts, dimensions, links, rigidity
    Check(CommonArgs),
    /// Maximize the volume and extract the classified outcome
    Optimize(OptimizeArgs),
    /// Maximize the volume and report the gluing-equation solution
    Thurston(OptimizeArgs),
    /// Exact 2-quad certificates and clusters (no optimization)
    Certify(CertifyArgs),
    /// Enumerate Z2-taut structures
    Z2taut(Z2Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check(args) => run_check(args),
        Command::Optimize(args) => run_optimize(args, false),
        Command::Thurston(args) => run_optimize(args, true),
        Command::Certify(args) => run_certify(args),
        Command::Z2taut(args) => run_z2taut(args),
    }
}

fn load_triangulation(path: &PathBuf) -> Result<Triangulation, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_INPUT)
    })?;
    parse_triangulation(&text).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_INPUT)
    })
}

fn emit<T: Serialize>(report: &T, out: &Option<PathBuf>) -> ExitCode {
    let json = serde_json::to_string_pretty(report).expect("serializable report");
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
            ExitCode::SUCCESS
        }
        None => {
            println!("{json}");
            ExitCode::SUCCESS
        }
    }
}

fn run_check(args: CommonArgs) -> ExitCode {
    let tri = match load_triangulation(&args.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    emit(&CheckReport::new(&tri), &args.out)
}

fn load_curvature(
    tri: &Triangulation,
    path: &Option<PathBuf>,
) -> Result<CurvatureAssignment, ExitCode> {
    let k = match path {
        None => CurvatureAssignment::trivial(tri),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| {
                eprintln!("error: cannot read {}: {e}", p.display());
                ExitCode::from(EXIT_INPUT)
            })?;
            CurvatureAssignment::parse(tri, &text).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_INPUT)
            })?
        }
    };
    if let Err(v) = curvature_admissible(tri, &k) {
        eprintln!("error: inadmissible curvature: {v}");
        return Err(ExitCode::from(EXIT_CURVATURE));
    }
    Ok(k)
}

fn run_optimize(args: OptimizeArgs, thurston_only: bool) -> ExitCode {
    let tri = match load_triangulation(&args.common.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let k = match load_curvature(&tri, &args.curvature) {
        Ok(k) => k,
        Err(code) => return code,
    };
    let opts = MaximizeOpts {
        grad_tol: args.grad_tol,
        eps_flat: args.eps_flat,
        max_iters: args.max_iters,
        multistart: args.multistart,
        seed: args.seed,
        lattice: LatticeSearchOpts {
            max_l1: args.lattice_l1,
            ..Default::default()
        },
    };
    let (report, exit) = match maximize(&tri, &k, &opts) {
        Ok(r) => (r, ExitCode::SUCCESS),
        Err(VolumeError::DidNotConverge(r)) => {
            eprintln!("error: did not converge within the iteration cap");
            (*r, ExitCode::from(EXIT_CONVERGENCE))
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CURVATURE);
        }
    };
    // trace of the winning run as JSON lines on stderr
    for record in &report.trace {
        eprintln!("{}", serde_json::to_string(record).expect("serializable"));
    }
    let json = assemble_optimize_report(&tri, &k, &report, &opts, thurston_only);
    let emitted = emit(&json, &args.common.out);
    if exit == ExitCode::SUCCESS {
        emitted
    } else {
        exit
    }
}

fn assemble_optimize_report(
    tri: &Triangulation,
    k: &CurvatureAssignment,
    report: &CriticalReport,
    opts: &MaximizeOpts,
    thurston_only: bool,
) -> OptimizeReport {
    let mut out = OptimizeReport::new(report, k);
    let tas = tas_basis(tri);
    match report.kind {
        PointKind::Smooth => {
            match thurston_from_smooth(tri, &report.point, opts.eps_flat, 1e-6) {
                Ok(z) => {
                    let residuals = verify_thurston(tri, &z, k, 1e-10);
                    out.thurston = Some(ThurstonJson::new(&z, &residuals));
                }
                Err(e) => eprintln!("note: no gluing-equation solution extracted: {e}"),
            }
            if let Ok(lift) = log_sine_vector(tri, &report.point, &tas, 1e-6) {
                out.log_sine = Some(LogSineJson::new(&lift));
            }
        }
        PointKind::NonSmooth => {
            if !thurston_only {
                out.certificates = Some(
                    report
                        .classification
                        .flat_quads
                        .iter()
                        .filter_map(|&q0| two_quad_certificate(tri, &tas, q0).ok())
                        .map(|c| CertificateJson::new(&c))
                        .collect(),
                );
                out.clusters = Some(
                    cluster_detect(tri, &tas)
                        .iter()
                        .map(ClusterJson::new)
                        .collect(),
                );
            }
        }
    }
    out
}

fn run_certify(args: CertifyArgs) -> ExitCode {
    let tri = match load_triangulation(&args.common.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let tas = tas_basis(&tri);
    let quads: Vec<usize> = match args.quad {
        Some(q) if q < tri.num_quads() => vec![q],
        Some(q) => {
            eprintln!("error: quad {q} out of range (have {})", tri.num_quads());
            return ExitCode::from(EXIT_INPUT);
        }
        None => (0..tri.num_quads()).collect(),
    };
    let certificates = quads
        .into_iter()
        .map(|q0| match two_quad_certificate(&tri, &tas, q0) {
            Ok(c) => CertifyEntry {
                q0,
                certificate: Some(CertificateJson::new(&c)),
                error: None,
            },
            Err(e) => CertifyEntry {
                q0,
                certificate: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let report = CertifyReport {
        rigidity: trivol::normal::rigidity_report(&tri, &tas),
        certificates,
        clusters: cluster_detect(&tri, &tas)
            .iter()
            .map(ClusterJson::new)
            .collect(),
    };
    emit(&report, &args.common.out)
}

fn run_z2taut(args: Z2Args) -> ExitCode {
    let tri = match load_triangulation(&args.common.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let mode = match args.mode.as_str() {
        "first" => Mode::First,
        "all" => Mode::All,
        other => {
            eprintln!("error: unknown mode {other:?} (expected first|all)");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let (solutions, status) = solve_z2_taut(&tri, mode, args.budget);
    let report = Z2TautReport::new(&solutions, status);
    let emitted = emit(&report, &args.common.out);
    if status == SolveStatus::BudgetExhausted {
        eprintln!("error: solver budget exhausted after {} nodes", args.budget);
        return ExitCode::from(EXIT_BUDGET);
    }
    emitted
}
