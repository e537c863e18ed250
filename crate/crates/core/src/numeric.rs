//! Tolerance-governed dense kernels: SVD with rank decisions, the
//! Moore–Penrose inverse, and Löwner comparison.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;

use crate::error::{mismatch, Error, Result};
use crate::tolerance::ToleranceContext;

/// Row-major in files, column-major in memory. Adjoint is the transpose.
pub type DenseMatrix = DMatrix<f64>;

/// Rejects NaN and infinite entries.
pub fn check_finite(m: &DenseMatrix) -> Result<()> {
    for (j, col) in m.column_iter().enumerate() {
        if let Some(i) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: j });
        }
    }
    Ok(())
}

/// Singular values sorted nonincreasing with matching thin factors.
pub(crate) struct Svd {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub vt: DenseMatrix,
}

pub(crate) fn svd(m: &DenseMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    if p == 0 {
        return Ok(Svd {
            u: DenseMatrix::zeros(rows, 0),
            s: Vec::new(),
            vt: DenseMatrix::zeros(0, cols),
        });
    }
    // nalgebra's SVD returns inconsistent factors on some rank-deficient
    // inputs (products of projectors), so the decomposition runs in faer
    let fm = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let (fu, fs, fv) = match fm.thin_svd() {
        Ok(raw) => (
            raw.U().to_owned(),
            raw.S().column_vector().to_owned(),
            raw.V().to_owned(),
        ),
        Err(_) => svd_via_qr(&fm)?,
    };
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| fs[b].total_cmp(&fs[a]));
    let s = order.iter().map(|&i| fs[i]).collect();
    let u = DenseMatrix::from_fn(rows, p, |i, j| fu[(i, order[j])]);
    let vt = DenseMatrix::from_fn(p, cols, |i, j| fv[(j, order[i])]);
    Ok(Svd { u, s, vt })
}

// faer's bidiagonal solver occasionally stalls on dense, well-scaled inputs.
// Reducing to the triangular QR factor first sidesteps it.
fn svd_via_qr(fm: &faer::Mat<f64>) -> Result<(faer::Mat<f64>, faer::Col<f64>, faer::Mat<f64>)> {
    let wide = fm.nrows() < fm.ncols();
    let tall = if wide { fm.transpose().to_owned() } else { fm.clone() };
    let qr = tall.qr();
    let q = qr.compute_thin_Q();
    let r = qr.thin_R().to_owned();
    let inner = r
        .thin_svd()
        .map_err(|e| Error::NumericalKernel(format!("SVD did not converge: {e:?}")))?;
    let left = &q * inner.U();
    let s = inner.S().column_vector().to_owned();
    let right = inner.V().to_owned();
    Ok(if wide { (right, s, left) } else { (left, s, right) })
}

/// Spectral norm.
pub fn op_norm(m: &DenseMatrix) -> f64 {
    svd(m).map_or(f64::NAN, |f| f.s.first().copied().unwrap_or(0.0))
}

/// Result of a rank-revealing SVD.
#[derive(Debug, Clone)]
pub struct SvdRank {
    pub rank: usize,
    /// All `min(m, n)` singular values, nonincreasing.
    pub singular_values: Vec<f64>,
    /// Orthonormal basis of the range (`m × rank`).
    pub left_basis: DenseMatrix,
    /// Orthonormal basis of the orthogonal complement of the nullspace (`n × rank`).
    pub right_basis: DenseMatrix,
}

/// Rank by relative truncation against the largest singular value.
pub fn svd_rank(m: &DenseMatrix, tol: &ToleranceContext) -> Result<SvdRank> {
    svd_rank_scaled(m, 0.0, tol)
}

/// Like [`svd_rank`] but measures the cutoff against `max(σ_max, reference)`.
///
/// Derived operands (differences, compressions) can be pure roundoff while
/// the operators they came from are O(1); passing the parent norm as
/// `reference` keeps that roundoff from being counted as rank.
pub fn svd_rank_scaled(m: &DenseMatrix, reference: f64, tol: &ToleranceContext) -> Result<SvdRank> {
    let (rows, cols) = m.shape();
    let f = svd(m)?;
    let cutoff = cutoff(&f.s, rows, cols, reference, tol);
    let rank = f.s.iter().filter(|&&s| s > cutoff).count();
    Ok(SvdRank {
        rank,
        left_basis: f.u.columns(0, rank).into_owned(),
        right_basis: f.vt.rows(0, rank).transpose(),
        singular_values: f.s,
    })
}

fn cutoff(s: &[f64], rows: usize, cols: usize, reference: f64, tol: &ToleranceContext) -> f64 {
    let top = s.first().copied().unwrap_or(0.0).max(reference);
    tol.rank_rel_tol(rows, cols) * top
}

/// Moore–Penrose inverse by truncated SVD.
pub fn pinv(m: &DenseMatrix, tol: &ToleranceContext) -> Result<DenseMatrix> {
    pinv_scaled(m, 0.0, tol)
}

/// [`pinv`] with the rank cutoff measured against `max(σ_max, reference)`.
pub fn pinv_scaled(m: &DenseMatrix, reference: f64, tol: &ToleranceContext) -> Result<DenseMatrix> {
    let (rows, cols) = m.shape();
    let f = svd(m)?;
    let cutoff = cutoff(&f.s, rows, cols, reference, tol);
    let mut out = DenseMatrix::zeros(cols, rows);
    for (k, &s) in f.s.iter().enumerate() {
        if s <= cutoff {
            break;
        }
        out += (f.vt.row(k).transpose() * f.u.column(k).transpose()) / s;
    }
    Ok(out)
}

/// Orthonormal basis (`cols × d`) of the numerical nullspace.
pub(crate) fn nullspace_basis(m: &DenseMatrix, reference: f64, tol: &ToleranceContext) -> Result<DenseMatrix> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    // a wide matrix is padded with zero rows so the SVD yields a full V
    let padded;
    let work = if rows < cols {
        let mut p = DenseMatrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let f = svd(work)?;
    let cutoff = cutoff(&f.s, rows, cols, reference, tol);
    let rank = f.s.iter().filter(|&&s| s > cutoff).count();
    Ok(f.vt.rows(rank, cols - rank).transpose())
}

/// Square diagonal matrix.
pub fn diag(values: &[f64]) -> DenseMatrix {
    DenseMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

pub fn symmetrize(m: &DenseMatrix) -> DenseMatrix {
    (m + m.transpose()) * 0.5
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DenseMatrix) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    let eig = SymmetricEigen::try_new(symmetrize(m), f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalKernel("symmetric eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.min())
}

/// Löwner comparison `A ≤ B` for symmetric operands.
pub fn loewner_leq(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<bool> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(mismatch(
            "loewner_leq",
            format!("{:?} square", a.shape()),
            format!("{:?}", b.shape()),
        ));
    }
    let scale = 1f64.max(op_norm(a)).max(op_norm(b));
    Ok(min_eigenvalue(&(b - a))? >= -tol.loewner_tol() * scale)
}

/// Residuals of the four Penrose equations, each relative to
/// `max(1, ‖M‖, ‖X‖)`: `MXM = M`, `XMX = X`, `(MX)ᵀ = MX`, `(XM)ᵀ = XM`.
pub fn penrose_residuals(m: &DenseMatrix, x: &DenseMatrix) -> [f64; 4] {
    let scale = 1f64.max(op_norm(m)).max(op_norm(x));
    let mx = m * x;
    let xm = x * m;
    [
        op_norm(&(&mx * m - m)),
        op_norm(&(&xm * x - x)),
        op_norm(&(mx.transpose() - &mx)),
        op_norm(&(xm.transpose() - &xm)),
    ]
    .map(|r| r / scale)
}
