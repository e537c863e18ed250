mod error;
mod io;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use shortop::bench::bench_update_vs_recompute;
use shortop::ff_update::ff_pinv_sum;
use shortop::range_calculus::{compatibility_report, is_compatible, sumarangos_report, CompatibilityReport};
use shortop::shorted::{parallel_sum, parallel_sum_direct, parallel_sum_reduced, shorted_krein, shorted_schur};
use shortop::verify::{run_suite, DimRange};
use shortop::{op_norm, pinv, DenseMatrix, PsdMatrix, Subspace, ToleranceContext};

use crate::error::{CliError, Result};
use crate::io::{format_matrix, read_matrix, write_output};

/// Shorted operators, parallel sums, range additivity and pseudoinverse
/// updates on dense matrices.
///
/// Matrices are read from headerless CSV (one row per line) or from
/// MatrixMarket array files. A subspace is given as a matrix whose columns
/// span it.
#[derive(Debug, Parser)]
#[command(name = "shortctl", version)]
struct Cli {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,

    /// Principal-angle threshold (radians) for subspace comparisons.
    #[arg(long, global = true)]
    tol_angle: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShortMethod {
    Krein,
    Schur,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParallelMethod {
    /// Through square roots and a nullspace basis; PSD by construction.
    Factored,
    /// A(A+B)†B taken literally.
    Direct,
    /// Through the reduced solution of (A+B)X = A.
    Reduced,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Moore–Penrose pseudoinverse.
    Pinv {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shorted operator [S]A of a PSD matrix to a subspace.
    Shorted {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        /// `both` prints the Krein result and reports the Schur agreement residual on stderr.
        #[arg(long, value_enum, default_value_t = ShortMethod::Krein)]
        method: ShortMethod,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parallel sum A:B of two PSD matrices.
    Parallel {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = ParallelMethod::Factored)]
        method: ParallelMethod,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (A+B)† from A† and B† under the rank-additivity hypotheses.
    Ffsum {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compatibility of a PSD matrix with a subspace, as JSON.
    Compat {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Range additivity of a pair and its characterizations, as JSON.
    Rangeadd {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded randomized checks of the library's identities.
    Verify {
        /// Suite name, or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Inclusive dimension range, e.g. `2..12`.
        #[arg(long, default_value = "2..12")]
        dims: DimRange,
        #[arg(long, env = "SHORTCTL_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the pseudoinverse update against recomputation.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "8,32,128")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, env = "SHORTCTL_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct CompatOutput {
    compatible: bool,
    #[serde(flatten)]
    report: CompatibilityReport,
}

fn tolerances(cli: &Cli) -> Result<ToleranceContext> {
    let mut tol = ToleranceContext::default();
    if let Some(r) = cli.tol_rank {
        tol = tol.with_rank_rel_tol(r)?;
    }
    if let Some(a) = cli.tol_angle {
        tol = tol.with_angle_tol(a)?;
    }
    Ok(tol)
}

fn read_psd(path: &Path, tol: &ToleranceContext) -> Result<PsdMatrix> {
    Ok(PsdMatrix::new(read_matrix(path)?, tol)?)
}

fn read_subspace(path: &Path, tol: &ToleranceContext) -> Result<Subspace> {
    Ok(Subspace::from_spanning(&read_matrix(path)?, tol)?)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

fn write_matrix(out: Option<&PathBuf>, m: &DenseMatrix) -> Result<()> {
    write_output(out, &format_matrix(m))
}

/// Returns the exit status for runs that completed but found failures.
fn run(cli: Cli) -> Result<ExitCode> {
    let tol = tolerances(&cli)?;
    match &cli.command {
        Command::Pinv { matrix, out } => {
            write_matrix(out.as_ref(), &pinv(&read_matrix(matrix)?, &tol)?)?;
        }
        Command::Shorted {
            matrix,
            subspace,
            method,
            out,
        } => {
            let a = read_psd(matrix, &tol)?;
            let s = read_subspace(subspace, &tol)?;
            match method {
                ShortMethod::Krein => write_matrix(out.as_ref(), shorted_krein(&a, &s, &tol)?.matrix())?,
                ShortMethod::Schur => write_matrix(out.as_ref(), shorted_schur(&a, &s, &tol)?.matrix())?,
                ShortMethod::Both => {
                    let k = shorted_krein(&a, &s, &tol)?;
                    let sc = shorted_schur(&a, &s, &tol)?;
                    let residual = op_norm(&(k.matrix() - sc.matrix()));
                    write_matrix(out.as_ref(), k.matrix())?;
                    eprintln!("krein/schur agreement residual: {residual:e}");
                    if residual > 1e-10 * a.norm().max(f64::MIN_POSITIVE) {
                        return Err(shortop::Error::Disagreement {
                            what: "Krein and Schur shorted operators",
                        }
                        .into());
                    }
                }
            }
        }
        Command::Parallel { a, b, method, out } => {
            let (a, b) = (read_psd(a, &tol)?, read_psd(b, &tol)?);
            let p = match method {
                ParallelMethod::Factored => parallel_sum(&a, &b, &tol)?,
                ParallelMethod::Direct => parallel_sum_direct(&a, &b, &tol)?,
                ParallelMethod::Reduced => parallel_sum_reduced(&a, &b, &tol)?,
            };
            write_matrix(out.as_ref(), p.matrix())?;
        }
        Command::Ffsum { a, b, out } => {
            let x = ff_pinv_sum(&read_matrix(a)?, &read_matrix(b)?, &tol)?;
            write_matrix(out.as_ref(), &x)?;
        }
        Command::Compat { matrix, subspace, out } => {
            let a = read_psd(matrix, &tol)?;
            let s = read_subspace(subspace, &tol)?;
            let report = compatibility_report(&a, &s, &tol)?;
            let compatible = is_compatible(&a, &s, &tol)?;
            write_output(out.as_ref(), &json(&CompatOutput { compatible, report }))?;
        }
        Command::Rangeadd { a, b, out } => {
            let report = sumarangos_report(&read_matrix(a)?, &read_matrix(b)?, &tol)?;
            write_output(out.as_ref(), &json(&report))?;
        }
        Command::Verify {
            suite,
            trials,
            dims,
            seed,
            out,
        } => {
            let report = run_suite(suite, *trials, *dims, *seed, &tol)?;
            write_output(out.as_ref(), &json(&report))?;
            if !report.passed() {
                eprintln!("{}: {} failing assertions", report.suite, report.failures.len());
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bench {
            dims,
            trials,
            seed,
            out,
        } => {
            // open the destination first so a bad path fails before the timing run
            let file = out
                .as_ref()
                .map(|p| {
                    File::create(p).map(|f| (p, f)).map_err(|source| CliError::Io {
                        path: p.clone(),
                        source,
                    })
                })
                .transpose()?;
            let report = bench_update_vs_recompute(dims, *trials, *seed, &tol)?;
            let text = json(&report);
            match file {
                Some((path, mut f)) => f.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?,
                None => write_output(None, &text)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("shortctl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
