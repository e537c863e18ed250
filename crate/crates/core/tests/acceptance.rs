//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::Instant;

use shortop::bench::bench_update_vs_recompute;
use shortop::ff_update::{ff_pinv_sum, FF_TOL};
use shortop::projections::projection_solution;
use shortop::range_calculus::is_range_additive;
use shortop::verify::{mixed_corpus_kinds, run_suite, DimRange, VerificationReport};
use shortop::{DenseMatrix, Error, ToleranceContext};

const SEED: u64 = 42;

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn dims(min: usize, max: usize) -> DimRange {
    DimRange::new(min, max).expect("valid range")
}

fn suite(name: &str, trials: usize, d: DimRange) -> Result<VerificationReport, Error> {
    run_suite(name, trials, d, SEED, &ToleranceContext::default())
}

fn describe(r: &VerificationReport) -> String {
    let mut s = format!(
        "{} trials, dims {}, {} failures, {} ms",
        r.trials,
        r.dims,
        r.failures.len(),
        r.elapsed_ms
    );
    if let Some(f) = r.failures.first() {
        s.push_str(&format!(
            "; first: `{}` residual {:?} (trial seed {})",
            f.assertion_name, f.measured_residual, f.trial_seed
        ));
    }
    s
}

fn from_suite(name: &str, trials: usize, d: DimRange) -> Outcome {
    match suite(name, trials, d) {
        Ok(r) => Outcome {
            pass: r.passed(),
            detail: describe(&r),
        },
        Err(e) => Outcome {
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn ff_oracle() -> Outcome {
    let start = Instant::now();
    let mut out = from_suite("ff-oracle", 1000, dims(2, 16));
    let secs = start.elapsed().as_secs_f64();
    out.pass &= secs <= 10.0;
    out.detail.push_str(&format!("; wall {secs:.2} s (limit 10 s)"));
    out
}

fn equivalence_suites() -> Outcome {
    let d = dims(2, 12);
    let kinds = mixed_corpus_kinds(1000, d, SEED);
    let share = kinds.iter().filter(|k| k.is_non_additive()).count() as f64 / kinds.len() as f64;
    let mut pass = share >= 0.30;
    let mut parts = vec![format!("non-additive share {:.1}%", 100.0 * share)];
    for name in ["sumarangos", "alejandra", "sad", "solvability"] {
        let o = from_suite(name, 1000, d);
        pass &= o.pass;
        parts.push(format!("{name}: {}", o.detail));
    }
    Outcome {
        pass,
        detail: parts.join(" | "),
    }
}

fn m2(v: [f64; 4]) -> DenseMatrix {
    DenseMatrix::from_row_slice(2, 2, &v)
}

fn fixture() -> Outcome {
    let tol = ToleranceContext::default();
    let a = m2([1.0, 1.0, 1.0, 1.0]);
    let b = m2([1.0, 0.0, 1.0, 0.0]);
    let run = || -> Result<Vec<(&'static str, bool)>, Error> {
        let additive = is_range_additive(&a, &b, &tol)?;
        let adjoint = is_range_additive(&a.transpose(), &b.transpose(), &tol)?;
        let ff = matches!(
            ff_pinv_sum(&a, &b, &tol),
            Err(Error::PreconditionViolated {
                hypothesis: "ranges_disjoint"
            })
        );
        let q = projection_solution(&a, &b, &tol)?;
        let qm = q.matrix();
        let expected = m2([0.0, 0.0, 1.0, 1.0]);
        Ok(vec![
            ("(A,B) additive", additive),
            ("(Aᵀ,Bᵀ) not additive", !adjoint),
            ("update rejected on ranges_disjoint", ff),
            ("Q = [[0,0],[1,1]]", (qm - &expected).abs().max() <= 1e-12),
            ("Q idempotent", (qm * qm - qm).abs().max() <= 1e-12),
            ("(A+B)Q = A", ((&a + &b) * qm - &a).abs().max() <= 1e-12),
        ])
    };
    match run() {
        Ok(checks) => {
            let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
            Outcome {
                pass: failed.is_empty(),
                detail: if failed.is_empty() {
                    format!("{} checks hold", checks.len())
                } else {
                    format!("failed: {}", failed.join(", "))
                },
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn bench() -> Outcome {
    let wanted = [8, 32, 128];
    let trials = 5;
    match bench_update_vs_recompute(&wanted, trials, SEED, &ToleranceContext::default()) {
        Ok(r) => {
            let json = serde_json::to_value(&r).expect("report serializes");
            let well_formed = json.as_array().is_some_and(|a| a.len() == wanted.len())
                && r.blocks
                    .iter()
                    .zip(wanted)
                    .all(|(b, d)| b.dim == d && b.ff_ns.len() == trials && b.recompute_ns.len() == trials);
            let err = r.max_rel_error();
            let medians: Vec<String> = r
                .blocks
                .iter()
                .map(|b| {
                    format!(
                        "n={}: update {} ns / recompute {} ns",
                        b.dim,
                        b.ff_median().unwrap_or(0),
                        b.recompute_median().unwrap_or(0)
                    )
                })
                .collect();
            Outcome {
                pass: well_formed && err <= FF_TOL,
                detail: format!(
                    "max rel error {err:e}, well-formed {well_formed}; {}",
                    medians.join(", ")
                ),
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("update formula vs SVD pseudoinverse", Box::new(ff_oracle)),
        (
            "update formula proof obligations",
            Box::new(|| from_suite("ff-obligations", 1000, dims(2, 16))),
        ),
        (
            "Krein vs Schur shorted operator",
            Box::new(|| from_suite("shorted-oracle", 1000, dims(2, 12))),
        ),
        (
            "Krein maximality",
            Box::new(|| from_suite("krein-maximality", 500, dims(2, 12))),
        ),
        ("Ando limit", Box::new(|| from_suite("ando", 200, dims(2, 12)))),
        (
            "Anderson-Trapp block identity",
            Box::new(|| from_suite("anderson-trapp", 300, dims(2, 8))),
        ),
        (
            "oblique projection pseudoinverse",
            Box::new(|| from_suite("penrose-greville", 500, dims(2, 12))),
        ),
        ("range-additivity equivalences", Box::new(equivalence_suites)),
        (
            "PSD degeneracy",
            Box::new(|| from_suite("psd-degeneracy", 500, dims(2, 12))),
        ),
        ("rank-one fixture pair", Box::new(fixture)),
        ("update benchmark", Box::new(bench)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
