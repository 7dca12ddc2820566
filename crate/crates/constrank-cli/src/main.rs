//! Command-line interface: rank checks, certificate construction and
//! verification, factorization, kernel-equality decisions and the Poincare
//! solver, all with file-based inputs and machine-readable reports.
//!
//! Exit codes: 0 when a verdict was reached (including negative verdicts),
//! 2 when a computation ended undetermined (cap exhaustion), 1 on errors.

mod io;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use constrank::crank::{self, Constancy, CrankConfig};
use constrank::factor::{self, FactorConfig, KernelVerdict};
use constrank::nullsatz::{self, Certificate};
use constrank::opcore::zoo::{self, ZooParams, ZOO_NAMES};
use constrank::poincare2d::{self, PolyField, SolveOptions};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_UNDETERMINED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "constrank",
    version,
    about = "Constant-rank analysis, Nullstellensatz certificates, annihilator factorization and a 2D spectral Poincare solver"
)]
struct Cli {
    /// Seed for every randomized-but-reproducible computation.
    #[arg(long, global = true, default_value_t = 0x5EED)]
    seed: u64,
    /// Power-membership / certificate cap (default derives from degrees).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Float tolerance for the solver's compatibility checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constant-rank analysis of an operator symbol.
    Crank {
        #[command(subcommand)]
        cmd: CrankCmd,
    },
    /// Nullstellensatz certificates for row-module inclusions.
    Nullsatz {
        #[command(subcommand)]
        cmd: NullsatzCmd,
    },
    /// Factorization through iterated gradients and kernel comparison.
    Factor {
        #[command(subcommand)]
        cmd: FactorCmd,
    },
    /// The two-dimensional Poincare solver.
    Poincare {
        #[command(subcommand)]
        cmd: PoincareCmd,
    },
    /// The built-in operator zoo.
    Opzoo {
        #[command(subcommand)]
        cmd: OpzooCmd,
    },
}

#[derive(Subcommand)]
enum CrankCmd {
    /// Decide constant rank over C and report the certificate data.
    Check(CrankArgs),
    /// Decide C-ellipticity (constant rank with full column rank).
    Ellipticity(CrankArgs),
}

#[derive(Args)]
struct CrankArgs {
    /// Operator JSON.
    #[arg(long)]
    op: PathBuf,
    /// Sample count for the generic-rank probe.
    #[arg(long, default_value_t = 8)]
    samples: usize,
    /// Report output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum NullsatzCmd {
    /// Construct a certificate q^m b = sum h_j p_j for the given system.
    Certify {
        /// System JSON (d x l polynomial matrix) or operator JSON.
        #[arg(long)]
        p: PathBuf,
        /// JSON array of the d polynomials b_i.
        #[arg(long)]
        b: PathBuf,
        /// Multiplier polynomial q (homogeneous, degree >= 1).
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a certificate file; exit 0 when valid, 1 otherwise.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Subcommand)]
enum FactorCmd {
    /// Factor a2 through a1: grad^k . a2 = B . a1.
    Through {
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a2: PathBuf,
        /// Require constant rank for both operators (default true).
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two symbols share every complex phase kernel.
    KernelEq {
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        bt: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PoincareCmd {
    /// Solve A v = u for a B-free grid field with face traces.
    Solve {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Grid CSV (x1,x2,comp_1..comp_d).
        #[arg(long)]
        u: PathBuf,
        /// Trace CSV (edge,t,comp_1..comp_d).
        #[arg(long)]
        traces: PathBuf,
        /// Grid size per axis (power of two).
        #[arg(long)]
        n: usize,
        /// Output potential CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Diagnostics report JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OpzooCmd {
    /// List the built-in operator names.
    List,
    /// Emit one zoo operator as JSON.
    Emit {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: usize,
        /// Component count N where applicable.
        #[arg(long, default_value_t = 1)]
        ncomp: usize,
        /// Gradient order for kgradient.
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Emit the unreduced curl-curl.
        #[arg(long, default_value_t = false)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct EllipticityReport {
    c_elliptic: bool,
    report: crank::RankReport,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    system: io::SystemJson,
    b: Vec<io::GPoly>,
    certificate: Certificate,
}

#[derive(Serialize)]
struct PolyFieldJson {
    components: usize,
    terms: Vec<PolyTermJson>,
}

#[derive(Serialize)]
struct PolyTermJson {
    exp: [u32; 2],
    coeff: Vec<f64>,
}

fn polyfield_json(p: &PolyField) -> PolyFieldJson {
    PolyFieldJson {
        components: p.components,
        terms: p
            .terms
            .iter()
            .map(|(&(i, j), c)| PolyTermJson {
                exp: [i, j],
                coeff: c.clone(),
            })
            .collect(),
    }
}

fn crank_config(cli: &Cli, samples: usize) -> CrankConfig {
    CrankConfig {
        seed: cli.seed,
        cap: cli.cap,
        samples,
        ..CrankConfig::default()
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Crank { cmd } => {
            let (args, want_ellipticity) = match cmd {
                CrankCmd::Check(a) => (a, false),
                CrankCmd::Ellipticity(a) => (a, true),
            };
            let op = io::read_operator(&args.op)?;
            let report = crank::is_constant_rank_c(&op.symbol(), &crank_config(cli, args.samples))
                .map_err(|e| anyhow::anyhow!("rank analysis failed: {e}"))?;
            let undetermined = matches!(report.constant_over_c, Constancy::Undetermined { .. });
            if want_ellipticity {
                io::write_json(
                    args.out.as_deref(),
                    &EllipticityReport {
                        c_elliptic: report.c_elliptic,
                        report,
                    },
                )?;
            } else {
                io::write_json(args.out.as_deref(), &report)?;
            }
            Ok(if undetermined { EXIT_UNDETERMINED } else { 0 })
        }
        Command::Nullsatz { cmd } => match cmd {
            NullsatzCmd::Certify { p, b, q, out } => {
                let sys = io::read_system(p)?;
                let bvec = io::read_poly_list(b)?;
                let qpoly = io::read_poly(q)?;
                let cfg = crank_config(cli, 8);
                let cap = cli.cap.unwrap_or_else(|| {
                    let entries: Vec<io::GPoly> = (0..sys.rows())
                        .flat_map(|j| (0..sys.cols()).map(move |i| (j, i)))
                        .map(|(j, i)| sys.entry(j, i).clone())
                        .collect();
                    constrank::groebner::default_cap(&entries).max(8)
                });
                match nullsatz::certify_row(&sys, &bvec, &qpoly, cap, &cfg) {
                    Ok(certificate) => {
                        let file = CertificateFile {
                            system: system_json_of(&sys),
                            b: bvec,
                            certificate,
                        };
                        io::write_json(out.as_deref(), &file)?;
                        Ok(0)
                    }
                    Err(nullsatz::NullsatzError::CapExceeded(c)) => {
                        eprintln!("undetermined: certificate cap {c} exhausted");
                        Ok(EXIT_UNDETERMINED)
                    }
                    Err(e) => Err(e.into()),
                }
            }
            NullsatzCmd::Verify { cert } => {
                let file: CertificateFile = io::read_json(cert)?;
                let rows: Vec<Vec<io::GPoly>> = (0..file.system.cols)
                    .map(|j| {
                        (0..file.system.rows)
                            .map(|i| file.system.entries[i][j].clone())
                            .collect()
                    })
                    .collect();
                let sys = constrank::opcore::SymbolMatrix::from_rows(file.system.n, rows)
                    .map_err(|e| anyhow::anyhow!("invalid system: {e}"))?;
                let outcome = nullsatz::verify_certificate(&sys, &file.b, &file.certificate);
                io::write_json(None, &outcome)?;
                Ok(if outcome.ok { 0 } else { 1 })
            }
        },
        Command::Factor { cmd } => match cmd {
            FactorCmd::Through {
                a1,
                a2,
                strict,
                out,
            } => {
                let op1 = io::read_operator(a1)?;
                let op2 = io::read_operator(a2)?;
                let cfg = FactorConfig {
                    seed: cli.seed,
                    cap: cli.cap,
                    strict: *strict,
                };
                match factor::factor_through(&op1, &op2, &cfg) {
                    Ok(result) => {
                        io::write_json(out.as_deref(), &result)?;
                        Ok(0)
                    }
                    Err(factor::FactorError::CapExceeded(c)) => {
                        eprintln!("undetermined: certificate cap {c} exhausted");
                        Ok(EXIT_UNDETERMINED)
                    }
                    Err(e) => Err(e.into()),
                }
            }
            FactorCmd::KernelEq { b, bt, out } => {
                let opb = io::read_operator(b)?;
                let opt = io::read_operator(bt)?;
                let cfg = FactorConfig {
                    seed: cli.seed,
                    cap: cli.cap,
                    strict: true,
                };
                let result = factor::symbol_kernel_equal(&opb, &opt, &cfg)?;
                let undetermined = matches!(result.verdict, KernelVerdict::Undetermined { .. });
                io::write_json(out.as_deref(), &result)?;
                Ok(if undetermined { EXIT_UNDETERMINED } else { 0 })
            }
        },
        Command::Poincare { cmd } => match cmd {
            PoincareCmd::Solve {
                a,
                b,
                u,
                traces,
                n,
                out,
                report,
            } => {
                let opa = io::read_operator(a)?;
                let opb = io::read_operator(b)?;
                let grid = io::read_grid_csv(u, *n)?;
                let tr = io::read_traces_csv(traces)?;
                let mut opts = SolveOptions {
                    seed: cli.seed,
                    ..SolveOptions::default()
                };
                if let Some(t) = cli.tol {
                    opts.trace_tol = t;
                }
                let sol = poincare2d::solve(&opa, &opb, &grid, &tr, &opts)?;
                if let Some(path) = out {
                    io::write_grid_csv(path, &sol.v)?;
                }
                let report_json = serde_json::json!({
                    "diagnostics": sol.diagnostics,
                    "polynomials": {
                        "p1": polyfield_json(&sol.p1),
                        "p3": polyfield_json(&sol.p3),
                        "p4": polyfield_json(&sol.p4),
                        "s1": sol.s1,
                    },
                    "s2": { "q1": sol.s2.q1, "q2": sol.s2.q2 },
                    "x_basis": sol.x_basis,
                });
                io::write_json(report.as_deref(), &report_json)?;
                Ok(0)
            }
        },
        Command::Opzoo { cmd } => match cmd {
            OpzooCmd::List => {
                for name in ZOO_NAMES {
                    println!("{name}");
                }
                Ok(0)
            }
            OpzooCmd::Emit {
                name,
                n,
                ncomp,
                order,
                full,
                out,
            } => {
                let params = ZooParams::new(*n)
                    .components(*ncomp)
                    .order(*order)
                    .full(*full);
                let op = zoo::builtin(name, params)
                    .map_err(|e| anyhow::anyhow!("cannot build {name:?}: {e}"))?;
                io::write_json(out.as_deref(), &op)?;
                Ok(0)
            }
        },
    }
}

fn system_json_of(sys: &constrank::opcore::SymbolMatrix) -> io::SystemJson {
    // back to the d x l file orientation
    let d = sys.cols();
    let l = sys.rows();
    io::SystemJson {
        n: sys.nvars(),
        rows: d,
        cols: l,
        entries: (0..d)
            .map(|i| (0..l).map(|j| sys.entry(j, i).clone()).collect())
            .collect(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
