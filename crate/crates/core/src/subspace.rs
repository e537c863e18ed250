//! Subspaces of R^n held as orthonormal bases, with the lattice
//! operations, preimages and comparisons built on them.

use crate::error::{mismatch, Result};
use crate::numeric::{nullspace_basis, op_norm, svd, svd_rank_scaled, DenseMatrix};
use crate::tolerance::ToleranceContext;

/// A subspace of R^n. The zero subspace has an `n × 0` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DenseMatrix,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal. Callers inside the crate
    /// only pass SVD factors here.
    pub(crate) fn from_orthonormal(basis: DenseMatrix) -> Self {
        Self { basis }
    }

    /// Orthonormalizes an arbitrary spanning set (columns of `spanning`).
    pub fn from_spanning(spanning: &DenseMatrix, tol: &ToleranceContext) -> Result<Self> {
        range_of(spanning, tol)
    }

    pub fn zero(n: usize) -> Self {
        Self {
            basis: DenseMatrix::zeros(n, 0),
        }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            basis: DenseMatrix::identity(n, n),
        }
    }

    /// Span of the listed standard basis vectors.
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let mut basis = DenseMatrix::zeros(n, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            basis[(i, j)] = 1.0;
        }
        Self { basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_whole(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    /// Orthogonal projector `basis · basisᵀ`.
    pub fn projector(&self) -> DenseMatrix {
        &self.basis * self.basis.transpose()
    }

    /// Orthogonal complement. The dimension is known exactly, so no rank
    /// decision is involved.
    pub fn complement(&self) -> Result<Self> {
        let n = self.ambient_dim();
        let k = self.dim();
        if k == 0 {
            return Ok(Self::whole(n));
        }
        if k == n {
            return Ok(Self::zero(n));
        }
        let f = svd(&self.projector())?;
        Ok(Self {
            basis: f.u.columns(k, n - k).into_owned(),
        })
    }

    pub fn sum(&self, other: &Self, tol: &ToleranceContext) -> Result<Self> {
        self.same_ambient("sum", other)?;
        let mut stacked = DenseMatrix::zeros(self.ambient_dim(), self.dim() + other.dim());
        stacked.columns_mut(0, self.dim()).copy_from(&self.basis);
        stacked.columns_mut(self.dim(), other.dim()).copy_from(&other.basis);
        range_of_scaled(&stacked, 1.0, tol)
    }

    /// `S ∩ T = (S^⊥ + T^⊥)^⊥`.
    pub fn intersect(&self, other: &Self, tol: &ToleranceContext) -> Result<Self> {
        self.same_ambient("intersect", other)?;
        self.complement()?.sum(&other.complement()?, tol)?.complement()
    }

    /// Principal angles in `[0, π/2]`, nondecreasing, `min(dim S, dim T)` of them.
    ///
    /// Small angles come from the sines and large ones from the cosines so
    /// that neither end loses precision to `acos` near 1.
    pub fn principal_angles(&self, other: &Self) -> Result<Vec<f64>> {
        self.same_ambient("principal_angles", other)?;
        let (big, small) = if self.dim() >= other.dim() {
            (self, other)
        } else {
            (other, self)
        };
        let k = small.dim();
        if k == 0 {
            return Ok(Vec::new());
        }
        let cos = svd(&(big.basis.transpose() * &small.basis))?.s;
        let residual = &small.basis - &big.basis * (big.basis.transpose() * &small.basis);
        let mut sin = svd(&residual)?.s;
        sin.reverse();
        let mut angles: Vec<f64> = (0..k)
            .map(|i| {
                let c = cos[i].clamp(0.0, 1.0);
                if c * c >= 0.5 {
                    sin[i].clamp(0.0, 1.0).asin()
                } else {
                    c.acos()
                }
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        Ok(angles)
    }

    pub fn equals(&self, other: &Self, tol: &ToleranceContext) -> Result<bool> {
        self.same_ambient("equals", other)?;
        if self.dim() != other.dim() {
            return Ok(false);
        }
        Ok(self.max_angle(other)? <= tol.angle_tol())
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Self, tol: &ToleranceContext) -> Result<bool> {
        self.same_ambient("contains", other)?;
        if other.dim() > self.dim() {
            return Ok(false);
        }
        Ok(self.max_angle(other)? <= tol.angle_tol())
    }

    /// `S ∩ T = {0}`.
    pub fn is_direct_sum(&self, other: &Self, tol: &ToleranceContext) -> Result<bool> {
        Ok(self.intersect(other, tol)?.is_zero())
    }

    fn max_angle(&self, other: &Self) -> Result<f64> {
        Ok(self.principal_angles(other)?.last().copied().unwrap_or(0.0))
    }

    fn same_ambient(&self, op: &'static str, other: &Self) -> Result<()> {
        if self.ambient_dim() == other.ambient_dim() {
            Ok(())
        } else {
            Err(mismatch(op, self.ambient_dim(), other.ambient_dim()))
        }
    }
}

/// Column space of `m`.
pub fn range_of(m: &DenseMatrix, tol: &ToleranceContext) -> Result<Subspace> {
    range_of_scaled(m, 0.0, tol)
}

/// Column space with the rank cutoff measured against `max(‖m‖, reference)`.
pub fn range_of_scaled(m: &DenseMatrix, reference: f64, tol: &ToleranceContext) -> Result<Subspace> {
    let r = svd_rank_scaled(m, reference, tol)?;
    Ok(Subspace::from_orthonormal(r.left_basis))
}

/// Kernel of `m`, a subspace of R^cols.
pub fn nullspace_of(m: &DenseMatrix, tol: &ToleranceContext) -> Result<Subspace> {
    nullspace_of_scaled(m, 0.0, tol)
}

pub fn nullspace_of_scaled(m: &DenseMatrix, reference: f64, tol: &ToleranceContext) -> Result<Subspace> {
    if m.ncols() == 0 {
        return Ok(Subspace::zero(0));
    }
    Ok(Subspace::from_orthonormal(nullspace_basis(m, reference, tol)?))
}

/// `{x : Mx ∈ S}`, computed as the kernel of `(I − P_S)·M`.
///
/// The rank cutoff is taken relative to `‖M‖`, since `(I − P_S)M` is pure
/// roundoff whenever `R(M) ⊆ S`.
pub fn preimage(m: &DenseMatrix, s: &Subspace, tol: &ToleranceContext) -> Result<Subspace> {
    if m.nrows() != s.ambient_dim() {
        return Err(mismatch("preimage", m.nrows(), s.ambient_dim()));
    }
    let n = m.nrows();
    let residual = (DenseMatrix::identity(n, n) - s.projector()) * m;
    nullspace_of_scaled(&residual, op_norm(m), tol)
}
