//! Symmetric positive-semidefinite matrices with a certified spectral
//! factorization.

use nalgebra::linalg::SymmetricEigen;

use crate::error::{mismatch, Error, Result};
#[cfg(test)]
use crate::numeric::diag;
use crate::numeric::{op_norm, symmetrize, DenseMatrix};
use crate::tolerance::ToleranceContext;

/// A PSD matrix together with its eigendecomposition
/// `matrix = eigvecs · diag(spectrum) · eigvecsᵀ`, spectrum nonincreasing
/// and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix {
    matrix: DenseMatrix,
    spectrum: Vec<f64>,
    eigvecs: DenseMatrix,
}

impl PsdMatrix {
    /// Validates symmetry and semidefiniteness.
    ///
    /// Negative eigenvalues no smaller than `-psd_clip_tol · λ_max` are
    /// clipped to zero; anything more negative is rejected.
    pub fn new(matrix: DenseMatrix, tol: &ToleranceContext) -> Result<Self> {
        Ok(Self::validate(matrix, 0.0, tol)?.0)
    }

    /// Symmetrizes `m` before validation.
    pub fn from_symmetrized(m: &DenseMatrix, tol: &ToleranceContext) -> Result<Self> {
        Self::new(symmetrize(m), tol)
    }

    /// Wraps a result computed from operands of norm `reference`.
    ///
    /// A result that is zero in theory has no scale of its own, so roundoff
    /// is judged against the operands: positive eigenvalues at or below the
    /// rank cutoff of `max(λ_max, reference)` are set to zero, and negative
    /// ones are clipped if within `psd_clip_tol · error_scale`, where
    /// `error_scale ≥ reference` accounts for any conditioning the
    /// computation amplified roundoff by. The matrix is rebuilt if anything
    /// changed.
    pub fn from_derived(m: &DenseMatrix, reference: f64, error_scale: f64, tol: &ToleranceContext) -> Result<Self> {
        let (mut out, raw_min) = Self::validate(symmetrize(m), error_scale.max(reference), tol)?;
        let n = out.dim();
        let cutoff = tol.rank_rel_tol(n, n) * out.norm().max(reference);
        if raw_min < 0.0 || out.spectrum.iter().any(|&l| l > 0.0 && l <= cutoff) {
            for l in out.spectrum.iter_mut() {
                if *l <= cutoff {
                    *l = 0.0;
                }
            }
            out.matrix = symmetrize(&out.spectral_map(|l| l));
        }
        Ok(out)
    }

    fn validate(matrix: DenseMatrix, reference: f64, tol: &ToleranceContext) -> Result<(Self, f64)> {
        let n = matrix.nrows();
        if n == 0 || !matrix.is_square() {
            return Err(mismatch(
                "PsdMatrix::new",
                "nonempty square",
                format!("{:?}", matrix.shape()),
            ));
        }
        crate::numeric::check_finite(&matrix)?;
        let norm = op_norm(&matrix);
        let asymmetry = op_norm(&(&matrix - matrix.transpose()));
        let threshold = tol.loewner_tol() * norm.max(reference);
        if asymmetry > threshold {
            return Err(Error::NotSymmetric { asymmetry, threshold });
        }
        let matrix = symmetrize(&matrix);
        let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::NumericalKernel("symmetric eigensolver did not converge".into()))?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let lambda_max = eig.eigenvalues[order[0]].max(0.0);
        let floor = -tol.psd_clip_tol() * lambda_max.max(reference);
        let min_eigenvalue = eig.eigenvalues[order[n - 1]];
        if min_eigenvalue < floor {
            return Err(Error::NotPsd {
                min_eigenvalue,
                threshold: floor,
            });
        }
        let spectrum = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        let eigvecs = DenseMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((
            Self {
                matrix,
                spectrum,
                eigvecs,
            },
            min_eigenvalue,
        ))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DenseMatrix::identity(n, n),
            spectrum: vec![1.0; n],
            eigvecs: DenseMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn eigvecs(&self) -> &DenseMatrix {
        &self.eigvecs
    }

    /// Largest eigenvalue, which is the spectral norm.
    pub fn norm(&self) -> f64 {
        self.spectrum[0]
    }

    /// Applies `f` to the spectrum: `V · diag(f(λ)) · Vᵀ`.
    pub(crate) fn spectral_map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let scaled = DenseMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.eigvecs[(i, j)] * f(self.spectrum[j])
        });
        &scaled * self.eigvecs.transpose()
    }
}

/// Principal square root.
///
/// Eigenvalues at or below the rank cutoff are treated as exact zeros so
/// that `R(√A) = R(A)` holds under the same rank decision used for `A`.
pub fn sqrt_psd(a: &PsdMatrix, tol: &ToleranceContext) -> PsdMatrix {
    let n = a.dim();
    let cutoff = tol.rank_rel_tol(n, n) * a.norm();
    let root = |l: f64| if l > cutoff { l.sqrt() } else { 0.0 };
    PsdMatrix {
        matrix: symmetrize(&a.spectral_map(root)),
        spectrum: a.spectrum.iter().map(|&l| root(l)).collect(),
        eigvecs: a.eigvecs.clone(),
    }
}
