//! The Krein shorted operator `[S]A` and the parallel sum `A:B`.
//!
//! `[S]A` is the Löwner-maximal PSD operator below `A` with range inside
//! `S`. Two independent algorithms are provided and are expected to agree:
//! the square-root formula `A^{1/2} P_M A^{1/2}` with `M = A^{-1/2}(S)`,
//! and the generalized Schur complement in a basis adapted to `S ⊕ S^⊥`.

use crate::error::{mismatch, Error, Result};
use crate::numeric::{op_norm, pinv, pinv_scaled, DenseMatrix};
use crate::psd::{sqrt_psd, PsdMatrix};
use crate::range_calculus::douglas_reduced;
use crate::subspace::{nullspace_of, preimage, Subspace};
use crate::tolerance::ToleranceContext;

fn check_dims(op: &'static str, a: &PsdMatrix, s: &Subspace) -> Result<()> {
    if a.dim() == s.ambient_dim() {
        Ok(())
    } else {
        Err(mismatch(op, a.dim(), s.ambient_dim()))
    }
}

fn check_pair(op: &'static str, a: &PsdMatrix, b: &PsdMatrix) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(mismatch(op, a.dim(), b.dim()))
    }
}

/// `[S]A = R · P_M · R` with `R = A^{1/2}` and `M = R^{-1}(S)`.
pub fn shorted_krein(a: &PsdMatrix, s: &Subspace, tol: &ToleranceContext) -> Result<PsdMatrix> {
    check_dims("shorted_krein", a, s)?;
    let root = sqrt_psd(a, tol);
    let r = root.matrix();
    let m = preimage(r, s, tol)?;
    PsdMatrix::from_derived(&(r * m.projector() * r), a.norm(), a.norm(), tol)
}

/// `[S]A` as the generalized Schur complement `A₁₁ − A₁₂ A₂₂† A₂₁` of the
/// compression of `A` to `S`, rotated back to the original coordinates.
pub fn shorted_schur(a: &PsdMatrix, s: &Subspace, tol: &ToleranceContext) -> Result<PsdMatrix> {
    check_dims("shorted_schur", a, s)?;
    let n = a.dim();
    if s.is_zero() {
        return PsdMatrix::new(DenseMatrix::zeros(n, n), tol);
    }
    if s.is_whole() {
        return Ok(a.clone());
    }
    let us = s.basis();
    let up = s.complement()?.basis().clone();
    let am = a.matrix();
    let a11 = us.transpose() * am * us;
    let a12 = us.transpose() * am * &up;
    let a22 = up.transpose() * am * &up;
    // A₂₂ is a compression of A; its rank is judged against ‖A‖
    let a22_pinv = pinv_scaled(&a22, a.norm(), tol)?;
    let correction = &a12 * &a22_pinv * a12.transpose();
    // roundoff in the difference scales with its terms, which grow like
    // ‖A₁₂‖²‖A₂₂†‖ when A₂₂ is ill-conditioned
    let scale = a.norm().max(op_norm(&a12).powi(2) * op_norm(&a22_pinv));
    let schur = a11 - correction;
    PsdMatrix::from_derived(&(us * schur * us.transpose()), a.norm(), scale, tol)
}

/// The parallel sum `A:B = A (A+B)† B`.
///
/// Evaluated in factored form: with `F = A^{1/2}`, `G = B^{1/2}` and `N` an
/// orthonormal basis of `N([F G])` whose top block is `N₁`,
/// `A:B = (F N₁)(F N₁)ᵀ`. The result is PSD by construction and its rank
/// noise is squared, unlike the direct product whose error grows with
/// `‖(A+B)†‖`.
pub fn parallel_sum(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceContext) -> Result<PsdMatrix> {
    check_pair("parallel_sum", a, b)?;
    let n = a.dim();
    let f = sqrt_psd(a, tol);
    let g = sqrt_psd(b, tol);
    let mut stacked = DenseMatrix::zeros(n, 2 * n);
    stacked.columns_mut(0, n).copy_from(f.matrix());
    stacked.columns_mut(n, n).copy_from(g.matrix());
    let kernel = nullspace_of(&stacked, tol)?;
    let top = f.matrix() * kernel.basis().rows(0, n);
    let scale = a.norm().max(b.norm());
    PsdMatrix::from_derived(&(&top * top.transpose()), scale, scale, tol)
}

/// `A (A+B)† B`, evaluated literally and symmetrized.
pub fn parallel_sum_direct(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceContext) -> Result<PsdMatrix> {
    check_pair("parallel_sum_direct", a, b)?;
    let sum_pinv = pinv(&(a.matrix() + b.matrix()), tol)?;
    let out = a.matrix() * &sum_pinv * b.matrix();
    // roundoff grows with ‖(A+B)†‖, so the PSD check is scaled accordingly
    let scale = a.norm().max(b.norm());
    PsdMatrix::from_derived(&out, scale, scale.max(a.norm() * b.norm() * op_norm(&sum_pinv)), tol)
}

/// `A:B = A^{1/2} Cᵀ D B^{1/2}` where `C`, `D` are the reduced solutions of
/// `(A+B)^{1/2} X = A^{1/2}` and `(A+B)^{1/2} X = B^{1/2}`.
pub fn parallel_sum_reduced(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceContext) -> Result<PsdMatrix> {
    check_pair("parallel_sum_reduced", a, b)?;
    let ra = sqrt_psd(a, tol);
    let rb = sqrt_psd(b, tol);
    let sum = PsdMatrix::from_symmetrized(&(a.matrix() + b.matrix()), tol)?;
    let rs = sqrt_psd(&sum, tol);
    let c = douglas_reduced(rs.matrix(), ra.matrix(), tol)?;
    let d = douglas_reduced(rs.matrix(), rb.matrix(), tol)?;
    let out = ra.matrix() * c.solution.transpose() * d.solution * rb.matrix();
    // the reduced solutions carry roundoff amplified by the condition
    // number of A+B
    let scale = a.norm().max(b.norm());
    let condition = sum.norm() * op_norm(&pinv(sum.matrix(), tol)?);
    PsdMatrix::from_derived(&out, scale, scale * condition.max(1.0), tol)
}

/// `A : (n · P_S)`, which increases to `[S]A` as `n → ∞`.
pub fn ando_iterate(a: &PsdMatrix, s: &Subspace, n: u64, tol: &ToleranceContext) -> Result<PsdMatrix> {
    check_dims("ando_iterate", a, s)?;
    if n == 0 {
        return Err(Error::PreconditionViolated {
            hypothesis: "ando_iterate requires n ≥ 1",
        });
    }
    let weight = PsdMatrix::from_symmetrized(&(s.projector() * n as f64), tol)?;
    parallel_sum(a, &weight, tol)
}

/// Leading `n × n` block of `[H ⊕ {0}] [[A, A], [A, A+B]]`, which equals `A:B`.
pub fn anderson_trapp_block(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceContext) -> Result<PsdMatrix> {
    check_pair("anderson_trapp_block", a, b)?;
    let n = a.dim();
    let mut block = DenseMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(a.matrix());
    block.view_mut((0, n), (n, n)).copy_from(a.matrix());
    block.view_mut((n, 0), (n, n)).copy_from(a.matrix());
    block.view_mut((n, n), (n, n)).copy_from(&(a.matrix() + b.matrix()));
    let block = PsdMatrix::new(block, tol).map_err(|e| match e {
        Error::NotPsd { .. } | Error::NotSymmetric { .. } => Error::BlockNotPsd,
        other => other,
    })?;
    let first: Vec<usize> = (0..n).collect();
    let shorted = shorted_krein(&block, &Subspace::coordinate(2 * n, &first), tol)?;
    PsdMatrix::from_derived(
        &shorted.matrix().view((0, 0), (n, n)).into_owned(),
        block.norm(),
        block.norm(),
        tol,
    )
}
