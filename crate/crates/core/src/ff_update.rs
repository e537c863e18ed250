//! Pseudoinverse of a rank-additive sum:
//!
//! `(A+B)† = (I−S) A† (I−T) + S B† T`
//!
//! with `S = (P_{N(B)^⊥} P_{N(A)})†` and `T = (P_{N(Aᵀ)} P_{N(Bᵀ)^⊥})†`,
//! valid when both the ranges and the adjoint ranges of `A` and `B` meet
//! only in zero. `S` and `T` are oblique projections.

use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::numeric::{op_norm, pinv, svd_rank, svd_rank_scaled, DenseMatrix};
use crate::projections::{pinv_of_projector_product, ObliqueProjection};
use crate::range_calculus::is_range_additive;
use crate::subspace::{nullspace_of, range_of, range_of_scaled, Subspace};
use crate::tolerance::ToleranceContext;

/// Tolerance for the oracle comparison and the proof-obligation identities.
pub const FF_TOL: f64 = 1e-9;

/// Hypotheses of the update formula, each computed independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FfPreconditionReport {
    /// `R(A) ∩ R(B) = {0}`
    pub ranges_disjoint: bool,
    /// `R(Aᵀ) ∩ R(Bᵀ) = {0}`
    pub adjoint_ranges_disjoint: bool,
    pub additive: bool,
    pub adjoint_additive: bool,
    /// `rk(A+B) = rk(A) + rk(B)`
    pub rank_additive: bool,
}

impl FfPreconditionReport {
    pub fn all_hold(&self) -> bool {
        self.first_violation().is_none()
    }

    /// Name of the first hypothesis that fails, in declaration order.
    pub fn first_violation(&self) -> Option<&'static str> {
        [
            ("ranges_disjoint", self.ranges_disjoint),
            ("adjoint_ranges_disjoint", self.adjoint_ranges_disjoint),
            ("additive", self.additive),
            ("adjoint_additive", self.adjoint_additive),
            ("rank_additive", self.rank_additive),
        ]
        .into_iter()
        .find(|(_, ok)| !ok)
        .map(|(name, _)| name)
    }

    fn require(&self) -> Result<()> {
        match self.first_violation() {
            None => Ok(()),
            Some(hypothesis) => Err(Error::PreconditionViolated { hypothesis }),
        }
    }
}

fn same_shape(op: &'static str, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.shape() == b.shape() {
        Ok(())
    } else {
        Err(mismatch(op, format!("{:?}", a.shape()), format!("{:?}", b.shape())))
    }
}

fn agree(what: &'static str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Disagreement { what })
    }
}

/// Evaluates the five hypotheses and checks the equivalences between them:
/// rank additivity is the conjunction of the two disjointness conditions,
/// and given one disjointness condition, the matching additivity condition
/// is equivalent to the other.
pub fn ff_precheck(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<FfPreconditionReport> {
    same_shape("ff_precheck", a, b)?;
    let (at, bt) = (a.transpose(), b.transpose());
    let scale = op_norm(a).max(op_norm(b));
    let report = FfPreconditionReport {
        ranges_disjoint: range_of(a, tol)?.is_direct_sum(&range_of(b, tol)?, tol)?,
        adjoint_ranges_disjoint: range_of(&at, tol)?.is_direct_sum(&range_of(&bt, tol)?, tol)?,
        additive: is_range_additive(a, b, tol)?,
        adjoint_additive: is_range_additive(&at, &bt, tol)?,
        rank_additive: svd_rank_scaled(&(a + b), scale, tol)?.rank == svd_rank(a, tol)?.rank + svd_rank(b, tol)?.rank,
    };
    let r = &report;
    agree(
        "rank additivity and disjointness of ranges and adjoint ranges",
        r.rank_additive == (r.ranges_disjoint && r.adjoint_ranges_disjoint),
    )?;
    agree(
        "additivity and adjoint disjointness under disjoint ranges",
        !r.ranges_disjoint || r.additive == r.adjoint_ranges_disjoint,
    )?;
    agree(
        "adjoint additivity and range disjointness under disjoint adjoint ranges",
        !r.adjoint_ranges_disjoint || r.adjoint_additive == r.ranges_disjoint,
    )?;
    Ok(report)
}

/// Subspaces feeding `S` and `T`.
struct Kernels {
    ker_a: Subspace,
    ker_b: Subspace,
    coker_a: Subspace,
    coker_b: Subspace,
}

impl Kernels {
    fn new(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<Self> {
        Ok(Self {
            ker_a: nullspace_of(a, tol)?,
            ker_b: nullspace_of(b, tol)?,
            coker_a: nullspace_of(&a.transpose(), tol)?,
            coker_b: nullspace_of(&b.transpose(), tol)?,
        })
    }

    fn s(&self, tol: &ToleranceContext) -> Result<ObliqueProjection> {
        pinv_of_projector_product(&self.ker_b.complement()?, &self.ker_a, tol)
    }

    fn t(&self, tol: &ToleranceContext) -> Result<ObliqueProjection> {
        pinv_of_projector_product(&self.coker_a, &self.coker_b.complement()?, tol)
    }
}

/// `S = (P_{N(B)^⊥} P_{N(A)})†`, the oblique projection onto
/// `P_{N(A)}(N(B)^⊥)` along `N(B)`.
pub fn ff_s(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<ObliqueProjection> {
    ff_precheck(a, b, tol)?.require()?;
    let k = Kernels::new(a, b, tol)?;
    let s = k.s(tol)?;
    let image = range_of(&(k.ker_a.projector() * k.ker_b.complement()?.basis()), tol)?;
    check_identification(&s, &image, &k.ker_b, tol)?;
    Ok(s)
}

/// `T = (P_{N(Aᵀ)} P_{N(Bᵀ)^⊥})†`, the oblique projection onto `R(B)`
/// along `R(A) + (R(A)^⊥ ∩ R(B)^⊥)`.
pub fn ff_t(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<ObliqueProjection> {
    ff_precheck(a, b, tol)?.require()?;
    let k = Kernels::new(a, b, tol)?;
    let t = k.t(tol)?;
    let ra = range_of(a, tol)?;
    let rb = range_of(b, tol)?;
    let along = ra.sum(&ra.complement()?.intersect(&rb.complement()?, tol)?, tol)?;
    check_identification(&t, &rb, &along, tol)?;
    Ok(t)
}

/// Checks the matrix of `q` against an independently computed range and
/// nullspace.
fn check_identification(
    q: &ObliqueProjection,
    range: &Subspace,
    nullsp: &Subspace,
    tol: &ToleranceContext,
) -> Result<()> {
    let m = q.matrix();
    agree(
        "oblique projection range",
        range_of_scaled(m, 1.0, tol)?.equals(range, tol)?,
    )?;
    let kernel = crate::subspace::nullspace_of_scaled(m, 1.0, tol)?;
    agree("oblique projection nullspace", kernel.equals(nullsp, tol)?)
}

/// `(I−S) A† (I−T) + S B† T`.
pub fn ff_formula(a_pinv: &DenseMatrix, b_pinv: &DenseMatrix, s: &DenseMatrix, t: &DenseMatrix) -> DenseMatrix {
    let n = s.nrows();
    let m = t.nrows();
    let i_s = DenseMatrix::identity(n, n) - s;
    let i_t = DenseMatrix::identity(m, m) - t;
    i_s * a_pinv * i_t + s * b_pinv * t
}

/// Update path: given `A†` and `B†`, builds `S` and `T` and applies the
/// formula. Performs no hypothesis checks.
pub fn ff_update(
    a: &DenseMatrix,
    b: &DenseMatrix,
    a_pinv: &DenseMatrix,
    b_pinv: &DenseMatrix,
    tol: &ToleranceContext,
) -> Result<DenseMatrix> {
    same_shape("ff_update", a, b)?;
    let k = Kernels::new(a, b, tol)?;
    Ok(ff_formula(a_pinv, b_pinv, k.s(tol)?.matrix(), k.t(tol)?.matrix()))
}

/// Scaled residuals of the three identities that characterize `X = (A+B)†`:
/// `(A+B)X = P_{R(A+B)}`, `X(A+B) = P_{R(Aᵀ+Bᵀ)}` and `X(A+B)X = X`.
pub fn proof_obligations(
    a: &DenseMatrix,
    b: &DenseMatrix,
    x: &DenseMatrix,
    tol: &ToleranceContext,
) -> Result<[f64; 3]> {
    let sum = a + b;
    let scale = op_norm(a).max(op_norm(b));
    let p_range = range_of_scaled(&sum, scale, tol)?.projector();
    let p_row = range_of_scaled(&sum.transpose(), scale, tol)?.projector();
    let nx = op_norm(x);
    let ns = op_norm(&sum);
    let unit = 1.0_f64.max(ns * nx);
    Ok([
        op_norm(&(&sum * x - p_range)) / unit,
        op_norm(&(x * &sum - p_row)) / unit,
        op_norm(&(x * &sum * x - x)) / (nx * unit).max(f64::MIN_POSITIVE),
    ])
}

/// `(A+B)†` by the update formula, with all hypotheses checked and the
/// three identities of [`proof_obligations`] enforced on the result.
pub fn ff_pinv_sum(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<DenseMatrix> {
    let s = ff_s(a, b, tol)?;
    let t = ff_t(a, b, tol)?;
    let x = ff_formula(&pinv(a, tol)?, &pinv(b, tol)?, s.matrix(), t.matrix());
    let names = ["(A+B)X = P_R(A+B)", "X(A+B) = P_R(Aᵀ+Bᵀ)", "X(A+B)X = X"];
    for (name, residual) in names.into_iter().zip(proof_obligations(a, b, &x, tol)?) {
        if residual.is_nan() || residual > FF_TOL {
            return Err(Error::Postcondition { name, residual });
        }
    }
    Ok(x)
}

/// `‖X − Y‖ / ‖Y‖`, or `‖X‖` when `Y = 0`.
pub fn relative_error(x: &DenseMatrix, reference: &DenseMatrix) -> f64 {
    let diff = op_norm(&(x - reference));
    let base = op_norm(reference);
    if base > 0.0 {
        diff / base
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{rank_additive_pair, rng};
    use crate::numeric::diag;

    fn tol() -> ToleranceContext {
        ToleranceContext::default()
    }

    fn paper_pair() -> (DenseMatrix, DenseMatrix) {
        (
            DenseMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]),
        )
    }

    #[test]
    fn coordinate_case() {
        let (a, b) = (diag(&[1.0, 0.0]), diag(&[0.0, 1.0]));
        let e2 = diag(&[0.0, 1.0]);
        assert!((ff_s(&a, &b, &tol()).unwrap().matrix() - &e2).abs().max() < 1e-15);
        assert!((ff_t(&a, &b, &tol()).unwrap().matrix() - &e2).abs().max() < 1e-15);
        let x = ff_pinv_sum(&a, &b, &tol()).unwrap();
        assert!((x - DenseMatrix::identity(2, 2)).abs().max() < 1e-15);
    }

    #[test]
    fn degenerate_edges() {
        let mut g = rng(51);
        let a = crate::generators::random_rank_matrix(&mut g, 5, 5, 3);
        let z = DenseMatrix::zeros(5, 5);
        let pa = pinv(&a, &tol()).unwrap();
        assert!(relative_error(&ff_pinv_sum(&a, &z, &tol()).unwrap(), &pa) < 1e-12);
        assert!(relative_error(&ff_pinv_sum(&z, &a, &tol()).unwrap(), &pa) < 1e-12);
        assert_eq!(ff_t(&a, &z, &tol()).unwrap().matrix().abs().max(), 0.0);
        let i = DenseMatrix::identity(3, 3);
        let s = ff_s(&i, &DenseMatrix::zeros(3, 3), &tol()).unwrap();
        assert_eq!(s.matrix().abs().max(), 0.0);
    }

    #[test]
    fn precheck_examples() {
        let (a, b) = paper_pair();
        let r = ff_precheck(&a, &b, &tol()).unwrap();
        assert!(!r.ranges_disjoint && !r.rank_additive);
        assert!(r.additive && !r.adjoint_additive);
        assert_eq!(
            ff_pinv_sum(&a, &b, &tol()).unwrap_err(),
            Error::PreconditionViolated {
                hypothesis: "ranges_disjoint"
            }
        );
        assert!(ff_precheck(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &tol())
            .unwrap()
            .all_hold());
        let b = DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!(ff_precheck(&DenseMatrix::zeros(2, 2), &b, &tol()).unwrap().all_hold());
        let d = diag(&[1.0, 0.0]);
        assert_eq!(
            ff_pinv_sum(&d, &d, &tol()).unwrap_err(),
            Error::PreconditionViolated {
                hypothesis: "ranges_disjoint"
            }
        );
        let i = DenseMatrix::identity(2, 2);
        let r = ff_precheck(&i, &i, &tol()).unwrap();
        assert!(r.additive && r.adjoint_additive && !r.ranges_disjoint && !r.rank_additive);
    }

    #[test]
    fn paper_pair_projections() {
        // the pair itself violates the hypotheses; its oblique projections
        // are still the ones named by the identification
        let (a, b) = paper_pair();
        let k = Kernels::new(&a, &b, &tol()).unwrap();
        let s = k.s(&tol()).unwrap();
        assert!(s.idempotency_residual() < 1e-12);
        let e2 = Subspace::coordinate(2, &[1]);
        assert!(s.nullsp().equals(&e2, &tol()).unwrap());
        let image = range_of(&(k.ker_a.projector() * k.ker_b.complement().unwrap().basis()), &tol()).unwrap();
        assert!(s.range().equals(&image, &tol()).unwrap());

        let t = k.t(&tol()).unwrap();
        let rb = range_of(&b, &tol()).unwrap();
        let diag11 = Subspace::from_spanning(&DenseMatrix::from_column_slice(2, 1, &[1.0, 1.0]), &tol()).unwrap();
        assert!(rb.equals(&diag11, &tol()).unwrap());
        assert!(t.idempotency_residual() < 1e-12);
    }

    #[test]
    fn random_pairs_match_oracle() {
        let mut g = rng(52);
        for n in 2..12 {
            for ra in 0..=n {
                for rb in 0..=(n - ra) {
                    let (a, b) = rank_additive_pair(&mut g, n, ra, rb);
                    let x = ff_pinv_sum(&a, &b, &tol()).unwrap();
                    let oracle = pinv(&(&a + &b), &tol()).unwrap();
                    let err = relative_error(&x, &oracle);
                    assert!(err <= FF_TOL, "n{n} ({ra}, {rb}): {err:e}");
                    let s = ff_s(&a, &b, &tol()).unwrap();
                    let k = Kernels::new(&a, &b, &tol()).unwrap();
                    let direct = pinv(
                        &(k.ker_b.complement().unwrap().projector() * k.ker_a.projector()),
                        &tol(),
                    )
                    .unwrap();
                    assert!((s.matrix() - direct).abs().max() <= 1e-10);
                    let upd =
                        ff_update(&a, &b, &pinv(&a, &tol()).unwrap(), &pinv(&b, &tol()).unwrap(), &tol()).unwrap();
                    assert!(relative_error(&upd, &oracle) <= FF_TOL);
                }
            }
        }
    }

    #[test]
    fn rank_one_pair_in_r5() {
        let mut g = rng(53);
        for _ in 0..20 {
            let (a, b) = rank_additive_pair(&mut g, 5, 1, 1);
            let x = ff_pinv_sum(&a, &b, &tol()).unwrap();
            assert!(relative_error(&x, &pinv(&(&a + &b), &tol()).unwrap()) <= FF_TOL);
        }
    }
}
