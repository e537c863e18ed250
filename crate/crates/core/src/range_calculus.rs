//! Range additivity `R(A+B) = R(A) + R(B)` and the family of conditions
//! equivalent to it, together with Douglas factorization, compatibility of
//! a PSD operator with a subspace, Thompson equivalence and Crimmins' range
//! identity.
//!
//! Every predicate is decided through ranks and principal angles under a
//! [`ToleranceContext`]. Operations that evaluate several characterizations
//! of the same property return [`Error::Disagreement`] if they ever differ.

use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::numeric::{op_norm, pinv, svd_rank_scaled, DenseMatrix};
use crate::psd::{sqrt_psd, PsdMatrix};
use crate::shorted::shorted_krein;
use crate::subspace::{nullspace_of, preimage, range_of, range_of_scaled, Subspace};
use crate::tolerance::ToleranceContext;

fn same_shape(op: &'static str, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.shape() == b.shape() {
        Ok(())
    } else {
        Err(mismatch(op, format!("{:?}", a.shape()), format!("{:?}", b.shape())))
    }
}

fn square_pair(op: &'static str, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    same_shape(op, a, b)?;
    if a.is_square() {
        Ok(())
    } else {
        Err(mismatch(op, "square operands", format!("{:?}", a.shape())))
    }
}

fn pair_scale(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    op_norm(a).max(op_norm(b))
}

fn agree(what: &'static str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Disagreement { what })
    }
}

/// `R(A+B) = R(A) + R(B)`.
///
/// The inclusion `⊆` always holds, so equality of dimensions decides it.
/// The rank of `A+B` is judged against `max(‖A‖, ‖B‖)` so that cancellation
/// is not mistaken for rank.
pub fn is_range_additive(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<bool> {
    same_shape("is_range_additive", a, b)?;
    let rank = svd_rank_scaled(&(a + b), pair_scale(a, b), tol)?.rank;
    let span = range_of(a, tol)?.sum(&range_of(b, tol)?, tol)?;
    Ok(rank == span.dim())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeAdditivityReport {
    pub additive: bool,
    /// `R(A) ⊆ R(A+B)`
    pub cond_contains_a: bool,
    /// `R(B) ⊆ R(A+B)`
    pub cond_contains_b: bool,
    /// `R(A−B) ⊆ R(A+B)`
    pub cond_contains_diff: bool,
    /// `dim R(A) ∩ R(B)`
    pub intersection_dim: usize,
    /// `A⁻¹(R(B)) + B⁻¹(R(A))` is the whole domain.
    pub alejandra_cover: bool,
    pub adjoint_additive: bool,
}

/// Evaluates additivity and its three containment characterizations
/// independently and checks that they agree.
pub fn sumarangos_report(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<RangeAdditivityReport> {
    same_shape("sumarangos_report", a, b)?;
    let scale = pair_scale(a, b);
    let ra = range_of(a, tol)?;
    let rb = range_of(b, tol)?;
    let rsum = range_of_scaled(&(a + b), scale, tol)?;
    let rdiff = range_of_scaled(&(a - b), scale, tol)?;

    let report = RangeAdditivityReport {
        additive: is_range_additive(a, b, tol)?,
        cond_contains_a: rsum.contains(&ra, tol)?,
        cond_contains_b: rsum.contains(&rb, tol)?,
        cond_contains_diff: rsum.contains(&rdiff, tol)?,
        intersection_dim: ra.intersect(&rb, tol)?.dim(),
        alejandra_cover: alejandra_cover(a, b, &ra, &rb, tol)?,
        adjoint_additive: is_range_additive(&a.transpose(), &b.transpose(), tol)?,
    };
    let conds = [
        report.cond_contains_a,
        report.cond_contains_b,
        report.cond_contains_diff,
    ];
    agree(
        "range additivity and its containment conditions",
        conds.iter().all(|&c| c == report.additive),
    )?;
    Ok(report)
}

fn alejandra_cover(
    a: &DenseMatrix,
    b: &DenseMatrix,
    ra: &Subspace,
    rb: &Subspace,
    tol: &ToleranceContext,
) -> Result<bool> {
    Ok(preimage(a, rb, tol)?.sum(&preimage(b, ra, tol)?, tol)?.is_whole())
}

/// `R(A)∩R(B) ⊆ R(A+B)` together with `H = A⁻¹(R(B)) + B⁻¹(R(A))`.
/// Equivalent to range additivity; the agreement is checked.
pub fn alejandra_check(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<bool> {
    square_pair("alejandra_check", a, b)?;
    let ra = range_of(a, tol)?;
    let rb = range_of(b, tol)?;
    let rsum = range_of_scaled(&(a + b), pair_scale(a, b), tol)?;
    let holds = rsum.contains(&ra.intersect(&rb, tol)?, tol)? && alejandra_cover(a, b, &ra, &rb, tol)?;
    agree(
        "cover condition and range additivity",
        holds == is_range_additive(a, b, tol)?,
    )?;
    Ok(holds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SadReport {
    /// `R(Aᵀ) ∩ R(Bᵀ) = {0}`
    pub cond1: bool,
    /// `N(A) + N(B)` is the whole domain.
    pub cond2: bool,
    /// `(A, B)` is range additive.
    pub cond3: bool,
    /// `R(A) ∩ R(B) = {0}`
    pub ranges_disjoint: bool,
}

/// Kernel-cover conditions for additivity. `cond1 ⟺ cond2 ⇒ cond3`, and
/// `cond3 ⇒ cond2` when the ranges are disjoint.
pub fn sad_report(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<SadReport> {
    same_shape("sad_report", a, b)?;
    let report = SadReport {
        cond1: range_of(&a.transpose(), tol)?.is_direct_sum(&range_of(&b.transpose(), tol)?, tol)?,
        cond2: nullspace_of(a, tol)?.sum(&nullspace_of(b, tol)?, tol)?.is_whole(),
        cond3: is_range_additive(a, b, tol)?,
        ranges_disjoint: range_of(a, tol)?.is_direct_sum(&range_of(b, tol)?, tol)?,
    };
    agree("disjoint adjoint ranges and kernel cover", report.cond1 == report.cond2)?;
    agree("kernel cover implies additivity", !report.cond2 || report.cond3)?;
    agree(
        "additivity with disjoint ranges implies kernel cover",
        !(report.cond3 && report.ranges_disjoint) || report.cond2,
    )?;
    Ok(report)
}

/// The reduced solution of `AX = B`: the unique solution with
/// `R(X) ⊆ N(A)^⊥`.
#[derive(Debug, Clone)]
pub struct DouglasSolution {
    pub solution: DenseMatrix,
    /// Smallest `λ` with `BBᵀ ≤ λ AAᵀ`, equal to `‖D‖²`.
    pub lambda_min: f64,
}

pub fn douglas_reduced(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<DouglasSolution> {
    if a.nrows() != b.nrows() {
        return Err(mismatch("douglas_reduced", a.nrows(), b.nrows()));
    }
    let ra = range_of(a, tol)?;
    if !ra.contains(&range_of(b, tol)?, tol)? {
        return Err(Error::RangeNotContained);
    }
    let d = pinv(a, tol)? * b;
    let nb = op_norm(b);
    let residual = op_norm(&(a * &d - b));
    if residual > 1e-10 * nb {
        return Err(Error::Postcondition {
            name: "AD = B",
            residual: residual / nb,
        });
    }
    let row_space = range_of(&a.transpose(), tol)?;
    if !row_space.contains(&range_of(&d, tol)?, tol)? {
        return Err(Error::Postcondition {
            name: "R(D) ⊆ N(A)^⊥",
            residual: f64::NAN,
        });
    }
    let lambda_min = op_norm(&d).powi(2);
    Ok(DouglasSolution {
        solution: d,
        lambda_min,
    })
}

/// `AX = B` is solvable exactly when `(A−B, B)` is range additive. Returns
/// whether the two sides agree, which they always should.
pub fn solvability_iff_additive(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<bool> {
    square_pair("solvability_iff_additive", a, b)?;
    let solvable = range_of(a, tol)?.contains(&range_of(b, tol)?, tol)?;
    let additive = is_range_additive(&(a - b), b, tol)?;
    Ok(solvable == additive)
}

/// Three independent characterizations of compatibility of `A` with `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    /// `S + (AS)^⊥` is the whole space.
    pub definition: bool,
    /// `R(P_S A P_S) = R(P_S A)`
    pub compression: bool,
    /// `N([S^⊥]A) = N(A) + S`
    pub shorted_kernel: bool,
}

pub fn compatibility_report(a: &PsdMatrix, s: &Subspace, tol: &ToleranceContext) -> Result<CompatibilityReport> {
    let n = a.dim();
    if s.ambient_dim() != n {
        return Err(mismatch("is_compatible", n, s.ambient_dim()));
    }
    let scale = a.norm();
    let ps = s.projector();
    let a_s = range_of_scaled(&(a.matrix() * &ps), scale, tol)?;
    let definition = s.sum(&a_s.complement()?, tol)?.dim() == n;

    let compressed = range_of_scaled(&(&ps * a.matrix() * &ps), scale, tol)?;
    let compression = compressed.equals(&range_of_scaled(&(&ps * a.matrix()), scale, tol)?, tol)?;

    let short = shorted_krein(a, &s.complement()?, tol)?;
    let short_kernel = crate::subspace::nullspace_of_scaled(short.matrix(), scale, tol)?;
    let shorted_kernel = short_kernel.equals(&nullspace_of(a.matrix(), tol)?.sum(s, tol)?, tol)?;

    Ok(CompatibilityReport {
        definition,
        compression,
        shorted_kernel,
    })
}

/// `H = S + (AS)^⊥`, cross-checked against the other characterizations.
pub fn is_compatible(a: &PsdMatrix, s: &Subspace, tol: &ToleranceContext) -> Result<bool> {
    let r = compatibility_report(a, s, tol)?;
    agree(
        "characterizations of compatibility",
        r.definition == r.compression && r.definition == r.shorted_kernel,
    )?;
    Ok(r.definition)
}

/// The five equivalent conditions for a PSD pair. Two of them are
/// closedness statements, which hold trivially for matrices and are
/// reported as `true` with `closedness_vacuous` set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedRangeReport {
    /// `A` compatible with `N(B)`
    pub c1: bool,
    /// `N(A) + N(B)` closed
    pub c2: bool,
    /// `B` compatible with `N(A)`
    pub c3: bool,
    /// `R(A) + R(B)` closed
    pub c4: bool,
    /// `(A, B)` range additive
    pub c5: bool,
    /// `R(A) + R(B) = R(B) ∔ A(N(B))`
    pub direct_decomposition: bool,
    pub closedness_vacuous: bool,
}

pub fn psd_closed_range_report(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceContext) -> Result<ClosedRangeReport> {
    if a.dim() != b.dim() {
        return Err(mismatch("psd_closed_range_report", a.dim(), b.dim()));
    }
    let ker_a = nullspace_of(a.matrix(), tol)?;
    let ker_b = nullspace_of(b.matrix(), tol)?;
    let rb = range_of(b.matrix(), tol)?;
    let a_ker_b = range_of_scaled(&(a.matrix() * ker_b.basis()), a.norm(), tol)?;
    let total = range_of(a.matrix(), tol)?.sum(&rb, tol)?;
    let direct_decomposition = rb.is_direct_sum(&a_ker_b, tol)? && rb.sum(&a_ker_b, tol)?.equals(&total, tol)?;

    let report = ClosedRangeReport {
        c1: is_compatible(a, &ker_b, tol)?,
        c2: true,
        c3: is_compatible(b, &ker_a, tol)?,
        c4: true,
        c5: is_range_additive(a.matrix(), b.matrix(), tol)?,
        direct_decomposition,
        closedness_vacuous: true,
    };
    let all = [report.c1, report.c3, report.c5, report.direct_decomposition];
    agree(
        "closed-range conditions for a PSD pair",
        all.iter().all(|&c| c == report.c1) && report.c1 == report.c2,
    )?;
    Ok(report)
}

/// For PSD `A`, `B` with `R(A) ∩ R(B) = {0}`: additivity holds exactly when
/// `A` is compatible with `N(B)`. Returns whether the two sides agree.
pub fn rangosdisjuntos_check(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceContext) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(mismatch("rangosdisjuntos_check", a.dim(), b.dim()));
    }
    if !range_of(a.matrix(), tol)?.is_direct_sum(&range_of(b.matrix(), tol)?, tol)? {
        return Err(Error::PreconditionViolated {
            hypothesis: "R(A) ∩ R(B) = {0}",
        });
    }
    let additive = is_range_additive(a.matrix(), b.matrix(), tol)?;
    let compatible = is_compatible(a, &nullspace_of(b.matrix(), tol)?, tol)?;
    Ok(additive == compatible)
}

/// `rA ≤ B ≤ sA` for some `r, s > 0`, decided as `R(A^{1/2}) = R(B^{1/2})`.
pub fn thompson_equivalent(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceContext) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(mismatch("thompson_equivalent", a.dim(), b.dim()));
    }
    let ra = range_of(sqrt_psd(a, tol).matrix(), tol)?;
    let rb = range_of(sqrt_psd(b, tol).matrix(), tol)?;
    ra.equals(&rb, tol)
}

/// `R((AAᵀ + BBᵀ)^{1/2})`, checked against `R(A) + R(B)`.
pub fn crimmins_range(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<Subspace> {
    if a.nrows() != b.nrows() {
        return Err(mismatch("crimmins_range", a.nrows(), b.nrows()));
    }
    let gram = PsdMatrix::from_symmetrized(&(a * a.transpose() + b * b.transpose()), tol)?;
    let out = range_of(sqrt_psd(&gram, tol).matrix(), tol)?;
    agree(
        "square-root range and range sum",
        out.equals(&range_of(a, tol)?.sum(&range_of(b, tol)?, tol)?, tol)?,
    )?;
    Ok(out)
}

/// `(A, B)` additive exactly when `(A+B)²` and `A² + B²` are Thompson
/// equivalent. Returns whether the two sides agree.
pub fn thompson_square_check(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceContext) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(mismatch("thompson_square_check", a.dim(), b.dim()));
    }
    let sum = a.matrix() + b.matrix();
    let left = PsdMatrix::from_symmetrized(&(&sum * &sum), tol)?;
    let right = PsdMatrix::from_symmetrized(&(a.matrix() * a.matrix() + b.matrix() * b.matrix()), tol)?;
    let additive = is_range_additive(a.matrix(), b.matrix(), tol)?;
    Ok(additive == thompson_equivalent(&left, &right, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{mixed_pair, random_psd, random_subspace, rng, trial_seed};
    use crate::numeric::diag;

    fn tol() -> ToleranceContext {
        ToleranceContext::default()
    }

    fn m2(v: [f64; 4]) -> DenseMatrix {
        DenseMatrix::from_row_slice(2, 2, &v)
    }

    fn psd(m: DenseMatrix) -> PsdMatrix {
        PsdMatrix::new(m, &tol()).unwrap()
    }

    fn paper_pair() -> (DenseMatrix, DenseMatrix) {
        (m2([1.0, 1.0, 1.0, 1.0]), m2([1.0, 0.0, 1.0, 0.0]))
    }

    #[test]
    fn additivity_fixture() {
        let (a, b) = paper_pair();
        assert!(is_range_additive(&a, &b, &tol()).unwrap());
        assert!(!is_range_additive(&a.transpose(), &b.transpose(), &tol()).unwrap());
        let i = DenseMatrix::identity(2, 2);
        assert!(is_range_additive(&i, &DenseMatrix::zeros(2, 2), &tol()).unwrap());
        assert!(is_range_additive(&i, &DenseMatrix::zeros(2, 3), &tol()).is_err());
    }

    #[test]
    fn sumarangos_fixture() {
        let (a, b) = paper_pair();
        let r = sumarangos_report(&a, &b, &tol()).unwrap();
        assert!(r.additive && r.cond_contains_a && r.cond_contains_b && r.cond_contains_diff);
        assert!(!r.adjoint_additive);
        assert_eq!(r.intersection_dim, 1);
        let z = DenseMatrix::zeros(3, 3);
        let r = sumarangos_report(&z, &z, &tol()).unwrap();
        assert!(r.additive && r.cond_contains_a && r.cond_contains_b && r.cond_contains_diff && r.adjoint_additive);
    }

    #[test]
    fn sumarangos_non_additive_generator() {
        let mut g = rng(41);
        for n in 3..9 {
            let (a, b) = crate::generators::non_additive_pair(&mut g, n);
            let r = sumarangos_report(&a, &b, &tol()).unwrap();
            assert!(!r.additive && !r.cond_contains_a && !r.cond_contains_b && !r.cond_contains_diff);
        }
    }

    #[test]
    fn alejandra_fixture() {
        let (a, b) = paper_pair();
        assert!(alejandra_check(&a, &b, &tol()).unwrap());
        assert!(!alejandra_check(&a.transpose(), &b.transpose(), &tol()).unwrap());
        let i = DenseMatrix::identity(3, 3);
        assert!(alejandra_check(&i, &i, &tol()).unwrap());
    }

    #[test]
    fn sad_fixture() {
        let r = sad_report(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &tol()).unwrap();
        assert_eq!((r.cond1, r.cond2, r.cond3), (true, true, true));
        let (a, b) = paper_pair();
        let r = sad_report(&a, &b, &tol()).unwrap();
        assert_eq!((r.cond1, r.cond2, r.cond3), (true, true, true));
        let i = DenseMatrix::identity(2, 2);
        let r = sad_report(&i, &i, &tol()).unwrap();
        assert_eq!((r.cond1, r.cond2, r.cond3), (false, false, true));
    }

    #[test]
    fn douglas_fixture() {
        let sol = douglas_reduced(&diag(&[2.0, 0.0]), &diag(&[1.0, 0.0]), &tol()).unwrap();
        assert!((sol.solution.clone() - diag(&[0.5, 0.0])).abs().max() < 1e-15);
        assert!((sol.lambda_min - 0.25).abs() < 1e-15);
        let bbt = diag(&[1.0, 0.0]);
        let aat = diag(&[4.0, 0.0]);
        assert!(crate::numeric::loewner_leq(&bbt, &(aat * sol.lambda_min), &tol()).unwrap());

        let sol = douglas_reduced(&diag(&[2.0, 0.0]), &DenseMatrix::zeros(2, 2), &tol()).unwrap();
        assert_eq!(sol.solution, DenseMatrix::zeros(2, 2));
        assert_eq!(sol.lambda_min, 0.0);

        assert_eq!(
            douglas_reduced(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &tol()).unwrap_err(),
            Error::RangeNotContained
        );
    }

    #[test]
    fn douglas_uniqueness_by_perturbation() {
        let mut g = rng(42);
        for n in 3..8 {
            let a = crate::generators::random_rank_matrix(&mut g, n, n, n - 1);
            let b = &a * crate::generators::random_matrix(&mut g, n, 2);
            let sol = douglas_reduced(&a, &b, &tol()).unwrap();
            let kernel = nullspace_of(&a, &tol()).unwrap();
            let shift = kernel.basis() * crate::generators::random_matrix(&mut g, kernel.dim(), 2);
            let other = &sol.solution + shift;
            // still solves AX = B but leaves N(A)^⊥
            assert!(op_norm(&(&a * &other - &b)) < 1e-10 * op_norm(&b));
            let row = range_of(&a.transpose(), &tol()).unwrap();
            assert!(!row.contains(&range_of(&other, &tol()).unwrap(), &tol()).unwrap());
        }
    }

    #[test]
    fn solvability_fixture() {
        assert!(solvability_iff_additive(&diag(&[2.0, 0.0]), &diag(&[1.0, 0.0]), &tol()).unwrap());
        assert!(solvability_iff_additive(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &tol()).unwrap());
        let (_, b) = paper_pair();
        assert!(solvability_iff_additive(&DenseMatrix::identity(2, 2), &b, &tol()).unwrap());
    }

    #[test]
    fn compatibility_fixture() {
        let s = Subspace::from_spanning(&DenseMatrix::from_column_slice(2, 1, &[1.0, 1.0]), &tol()).unwrap();
        assert!(is_compatible(&psd(diag(&[1.0, 0.0])), &s, &tol()).unwrap());
        let mut g = rng(43);
        for k in 0..=4 {
            let s = random_subspace(&mut g, 4, k);
            assert!(is_compatible(&PsdMatrix::identity(4), &s, &tol()).unwrap());
            assert!(is_compatible(&psd(DenseMatrix::zeros(4, 4)), &s, &tol()).unwrap());
            for rank in 0..=4 {
                let a = psd(random_psd(&mut g, 4, rank));
                let r = compatibility_report(&a, &s, &tol()).unwrap();
                assert!(r.definition && r.compression && r.shorted_kernel);
            }
        }
    }

    #[test]
    fn closed_range_fixture() {
        let r = psd_closed_range_report(&psd(diag(&[1.0, 0.0])), &psd(diag(&[0.0, 1.0])), &tol()).unwrap();
        assert!(r.c1 && r.c2 && r.c3 && r.c4 && r.c5 && r.direct_decomposition && r.closedness_vacuous);
        let z = psd(DenseMatrix::zeros(3, 3));
        let r = psd_closed_range_report(&z, &z, &tol()).unwrap();
        assert!(r.c1 && r.c3 && r.c5 && r.direct_decomposition);
        let mut g = rng(44);
        for n in 2..10 {
            let a = psd(random_psd(&mut g, n, n / 2));
            let b = psd(random_psd(&mut g, n, n - n / 2));
            let r = psd_closed_range_report(&a, &b, &tol()).unwrap();
            assert!(r.c1 && r.c3 && r.c5 && r.direct_decomposition);
        }
    }

    #[test]
    fn rangosdisjuntos_fixture() {
        assert!(rangosdisjuntos_check(&psd(diag(&[1.0, 0.0])), &psd(diag(&[0.0, 1.0])), &tol()).unwrap());
        assert!(rangosdisjuntos_check(&psd(diag(&[1.0, 0.0, 0.0])), &psd(diag(&[0.0, 0.0, 1.0])), &tol()).unwrap());
        let i = PsdMatrix::identity(2);
        assert!(matches!(
            rangosdisjuntos_check(&i, &i, &tol()),
            Err(Error::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn thompson_and_crimmins() {
        let i = PsdMatrix::identity(3);
        let two = psd(DenseMatrix::identity(3, 3) * 2.0);
        assert!(thompson_equivalent(&i, &two, &tol()).unwrap());
        assert!(!thompson_equivalent(&psd(diag(&[1.0, 0.0])), &psd(diag(&[0.0, 1.0])), &tol()).unwrap());

        let (a, b) = paper_pair();
        let r = crimmins_range(&a, &b, &tol()).unwrap();
        let expected = Subspace::from_spanning(&DenseMatrix::from_column_slice(2, 1, &[1.0, 1.0]), &tol()).unwrap();
        assert!(r.equals(&expected, &tol()).unwrap());

        assert!(thompson_square_check(&i, &i, &tol()).unwrap());
        assert!(thompson_square_check(&psd(diag(&[1.0, 0.0])), &psd(diag(&[0.0, 1.0])), &tol()).unwrap());
        let mut g = rng(45);
        for n in 2..8 {
            let a = psd(random_psd(&mut g, n, n - 1));
            let b = psd(random_psd(&mut g, n, 1));
            assert!(thompson_square_check(&a, &b, &tol()).unwrap());
        }
    }

    #[test]
    fn mixed_corpus_agreement() {
        let mut non_additive = 0;
        for i in 0..300 {
            let mut g = rng(trial_seed(46, i));
            let n = 2 + (i as usize % 9);
            let (kind, a, b) = mixed_pair(&mut g, n);
            let r = sumarangos_report(&a, &b, &tol()).unwrap();
            if kind.is_non_additive() {
                assert!(!r.additive, "{kind:?} n={n}");
                non_additive += 1;
            }
            assert_eq!(alejandra_check(&a, &b, &tol()).unwrap(), r.additive);
            sad_report(&a, &b, &tol()).unwrap();
            assert!(solvability_iff_additive(&a, &b, &tol()).unwrap());
        }
        assert!(non_additive >= 90);
    }
}
