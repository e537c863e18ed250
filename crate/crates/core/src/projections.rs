//! Oblique projections, the correspondence between projections and
//! pseudoinverses of products of orthogonal projectors, A-selfadjoint
//! projections, and idempotent solutions of `(A+B)X = A`.

use crate::error::{mismatch, Error, Result};
use crate::numeric::{op_norm, pinv_scaled, DenseMatrix};
use crate::psd::PsdMatrix;
use crate::subspace::{nullspace_of, nullspace_of_scaled, range_of, range_of_scaled, Subspace};
use crate::tolerance::ToleranceContext;

/// Relative idempotency tolerance, scaled by `max(1, ‖Q‖²)`.
pub const IDEMPOTENCY_TOL: f64 = 1e-10;

/// An idempotent `Q` with `R(Q) = range` and `N(Q) = nullsp`, written
/// `Q_{range//nullsp}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObliqueProjection {
    matrix: DenseMatrix,
    range: Subspace,
    nullsp: Subspace,
}

impl ObliqueProjection {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn range(&self) -> &Subspace {
        &self.range
    }

    pub fn nullsp(&self) -> &Subspace {
        &self.nullsp
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖Q² − Q‖ / max(1, ‖Q‖²)`.
    pub fn idempotency_residual(&self) -> f64 {
        idempotency_residual(&self.matrix)
    }

    /// `I − Q = Q_{nullsp//range}`.
    pub fn complementary(&self) -> Self {
        let n = self.dim();
        Self {
            matrix: DenseMatrix::identity(n, n) - &self.matrix,
            range: self.nullsp.clone(),
            nullsp: self.range.clone(),
        }
    }

    /// `Qᵀ = Q_{nullsp^⊥//range^⊥}`.
    pub fn transpose(&self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.transpose(),
            range: self.nullsp.complement()?,
            nullsp: self.range.complement()?,
        })
    }
}

pub fn idempotency_residual(q: &DenseMatrix) -> f64 {
    let norm = op_norm(q);
    op_norm(&(q * q - q)) / norm.powi(2).max(1.0)
}

fn ensure_idempotent(q: &DenseMatrix) -> Result<()> {
    let residual = idempotency_residual(q);
    if residual <= IDEMPOTENCY_TOL {
        Ok(())
    } else {
        Err(Error::Postcondition {
            name: "idempotency",
            residual,
        })
    }
}

/// `Q_{M//N}`: identity on `M`, zero on `N`.
///
/// Solved against the concatenated basis `C = [basis(M) | basis(N)]` as
/// `Q = [basis(M) | 0] · C⁻¹`.
pub fn oblique(m: &Subspace, n: &Subspace, tol: &ToleranceContext) -> Result<ObliqueProjection> {
    let dim = m.ambient_dim();
    if n.ambient_dim() != dim {
        return Err(mismatch("oblique", dim, n.ambient_dim()));
    }
    let not_complementary = Error::NotComplementary {
        range_dim: m.dim(),
        null_dim: n.dim(),
        ambient: dim,
    };
    if m.dim() + n.dim() != dim || !m.is_direct_sum(n, tol)? {
        return Err(not_complementary);
    }
    let mut concat = DenseMatrix::zeros(dim, dim);
    concat.columns_mut(0, m.dim()).copy_from(m.basis());
    concat.columns_mut(m.dim(), n.dim()).copy_from(n.basis());
    let mut image = DenseMatrix::zeros(dim, dim);
    image.columns_mut(0, m.dim()).copy_from(m.basis());
    // Qᵀ = C⁻ᵀ · imageᵀ
    let qt = concat
        .transpose()
        .lu()
        .solve(&image.transpose())
        .ok_or(not_complementary)?;
    let matrix = qt.transpose();
    ensure_idempotent(&matrix)?;
    Ok(ObliqueProjection {
        matrix,
        range: m.clone(),
        nullsp: n.clone(),
    })
}

/// `Q† = P_{N(Q)^⊥} · P_{R(Q)}`.
pub fn pinv_of_projection(q: &ObliqueProjection) -> DenseMatrix {
    let n = q.dim();
    let row_space = DenseMatrix::identity(n, n) - q.nullsp.projector();
    row_space * q.range.projector()
}

/// `(P_M P_N)†`, which is the oblique projection with range `R(P_N P_M)`
/// and nullspace `N(P_N P_M)`.
pub fn pinv_of_projector_product(m: &Subspace, n: &Subspace, tol: &ToleranceContext) -> Result<ObliqueProjection> {
    if m.ambient_dim() != n.ambient_dim() {
        return Err(mismatch("pinv_of_projector_product", m.ambient_dim(), n.ambient_dim()));
    }
    let pm = m.projector();
    let pn = n.projector();
    // products of projectors have norm ≤ 1; cut off against 1 so that
    // orthogonal pairs give exactly zero rather than amplified roundoff
    let matrix = pinv_scaled(&(&pm * &pn), 1.0, tol)?;
    let reversed = &pn * &pm;
    let range = range_of_scaled(&reversed, 1.0, tol)?;
    let nullsp = nullspace_of_scaled(&reversed, 1.0, tol)?;
    ensure_idempotent(&matrix)?;
    Ok(ObliqueProjection { matrix, range, nullsp })
}

/// The canonical `A`-selfadjoint projection onto `S`: `AE = EᵀA`,
/// `R(E) = S`, and `N(E)` the orthogonal complement of `S ∩ N(A)` taken
/// inside `(AS)^⊥`.
pub fn compatible_projection(a: &PsdMatrix, s: &Subspace, tol: &ToleranceContext) -> Result<ObliqueProjection> {
    let n = a.dim();
    if s.ambient_dim() != n {
        return Err(mismatch("compatible_projection", n, s.ambient_dim()));
    }
    let a_s = range_of_scaled(&(a.matrix() * s.basis()), a.norm(), tol)?;
    let a_s_perp = a_s.complement()?;
    if !s.sum(&a_s_perp, tol)?.is_whole() {
        return Err(Error::NotCompatible);
    }
    let degenerate = s.intersect(&nullspace_of(a.matrix(), tol)?, tol)?;
    let nullsp = a_s_perp.intersect(&degenerate.complement()?, tol)?;
    oblique(s, &nullsp, tol)
}

/// Idempotent `Q` with `(A+B)Q = A`, acting as the identity on
/// `W = (R(Aᵀ) + R(Bᵀ))^⊥`.
///
/// Built as `Qᵀ = Q_{R(Aᵀ)+W // R(Bᵀ)}`, so `QᵀAᵀ = Aᵀ` and `QᵀBᵀ = 0`.
pub fn projection_solution(a: &DenseMatrix, b: &DenseMatrix, tol: &ToleranceContext) -> Result<ObliqueProjection> {
    if a.shape() != b.shape() {
        return Err(mismatch(
            "projection_solution",
            format!("{:?}", a.shape()),
            format!("{:?}", b.shape()),
        ));
    }
    let row_a = range_of(&a.transpose(), tol)?;
    let row_b = range_of(&b.transpose(), tol)?;
    if !row_a.is_direct_sum(&row_b, tol)? {
        return Err(Error::PreconditionViolated {
            hypothesis: "adjoint ranges R(Aᵀ) and R(Bᵀ) intersect nontrivially",
        });
    }
    let w = row_a.sum(&row_b, tol)?.complement()?;
    let qt = oblique(&row_a.sum(&w, tol)?, &row_b, tol)?;
    qt.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complementary_pair, random_psd, random_subspace, rng};
    use crate::numeric::{diag, pinv};

    fn tol() -> ToleranceContext {
        ToleranceContext::default()
    }

    fn m2(v: [f64; 4]) -> DenseMatrix {
        DenseMatrix::from_row_slice(2, 2, &v)
    }

    fn diag_line() -> Subspace {
        Subspace::from_spanning(&DenseMatrix::from_column_slice(2, 1, &[1.0, 1.0]), &tol()).unwrap()
    }

    fn close(a: &DenseMatrix, b: &DenseMatrix, eps: f64) -> bool {
        (a - b).abs().max() <= eps
    }

    #[test]
    fn oblique_examples() {
        let e1 = Subspace::coordinate(2, &[0]);
        let e2 = Subspace::coordinate(2, &[1]);
        // columns fixed by Q e1 = (1,1), Q e2 = 0
        let q = oblique(&diag_line(), &e2, &tol()).unwrap();
        assert!(close(q.matrix(), &m2([1.0, 0.0, 1.0, 0.0]), 1e-15));

        let mut rng = rng(21);
        let s = random_subspace(&mut rng, 5, 2);
        let q = oblique(&s, &s.complement().unwrap(), &tol()).unwrap();
        assert!(close(q.matrix(), &s.projector(), 1e-13));

        assert!(matches!(oblique(&e1, &e1, &tol()), Err(Error::NotComplementary { .. })));
        assert!(matches!(
            oblique(&e1, &Subspace::zero(2), &tol()),
            Err(Error::NotComplementary { .. })
        ));
    }

    #[test]
    fn pinv_of_projection_examples() {
        let mut rng = rng(22);
        let s = random_subspace(&mut rng, 4, 3);
        let p = oblique(&s, &s.complement().unwrap(), &tol()).unwrap();
        assert!(close(&pinv_of_projection(&p), &s.projector(), 1e-13));

        let q = oblique(&diag_line(), &Subspace::coordinate(2, &[1]), &tol()).unwrap();
        // P_{span e1} · P_{span (1,1)} = (1/2)[[1,1],[0,0]]
        assert!(close(&pinv_of_projection(&q), &m2([0.5, 0.5, 0.0, 0.0]), 1e-15));

        let id = oblique(&Subspace::whole(3), &Subspace::zero(3), &tol()).unwrap();
        assert!(close(&pinv_of_projection(&id), &DenseMatrix::identity(3, 3), 1e-15));
    }

    #[test]
    fn pinv_of_projector_product_examples() {
        let e1 = Subspace::coordinate(2, &[0]);
        let q = pinv_of_projector_product(&e1, &diag_line(), &tol()).unwrap();
        assert!(close(q.matrix(), &m2([1.0, 0.0, 1.0, 0.0]), 1e-14));
        assert!(q.range().equals(&diag_line(), &tol()).unwrap());
        assert!(q.nullsp().equals(&Subspace::coordinate(2, &[1]), &tol()).unwrap());

        let mut rng = rng(23);
        let s = random_subspace(&mut rng, 5, 2);
        let q = pinv_of_projector_product(&s, &s, &tol()).unwrap();
        assert!(close(q.matrix(), &s.projector(), 1e-13));

        let t = s.complement().unwrap();
        let q = pinv_of_projector_product(&s, &t, &tol()).unwrap();
        assert_eq!(q.matrix(), &DenseMatrix::zeros(5, 5));
        assert!(q.range().is_zero());
        assert!(q.nullsp().is_whole());
    }

    #[test]
    fn penrose_greville_round_trip() {
        let mut rng = rng(24);
        for n in 2..8 {
            for k in 0..=n {
                let (m, nn) = complementary_pair(&mut rng, n, k, 1e-3);
                let q = oblique(&m, &nn, &tol()).unwrap();
                let qp = pinv_of_projection(&q);
                assert!(close(
                    &qp,
                    &pinv(q.matrix(), &tol()).unwrap(),
                    1e-10 * op_norm(q.matrix()).max(1.0)
                ));
                let back = pinv(&qp, &tol()).unwrap();
                assert!(close(&back, q.matrix(), 1e-9 * op_norm(q.matrix()).max(1.0)));
            }
        }
    }

    #[test]
    fn compatible_projection_examples() {
        let a = PsdMatrix::new(diag(&[1.0, 0.0]), &tol()).unwrap();
        let e = compatible_projection(&a, &diag_line(), &tol()).unwrap();
        assert!(close(e.matrix(), &m2([1.0, 0.0, 1.0, 0.0]), 1e-14));
        let ae = a.matrix() * e.matrix();
        assert!(close(&ae, &m2([1.0, 0.0, 0.0, 0.0]), 1e-14));
        assert!(close(&ae, &(e.matrix().transpose() * a.matrix()), 1e-14));

        let mut rng = rng(25);
        let s = random_subspace(&mut rng, 4, 2);
        let e = compatible_projection(&PsdMatrix::identity(4), &s, &tol()).unwrap();
        assert!(close(e.matrix(), &s.projector(), 1e-13));

        let zero = PsdMatrix::new(DenseMatrix::zeros(4, 4), &tol()).unwrap();
        let e = compatible_projection(&zero, &s, &tol()).unwrap();
        assert!(e.nullsp().equals(&s.complement().unwrap(), &tol()).unwrap());
        assert!(close(e.matrix(), &s.projector(), 1e-13));
    }

    #[test]
    fn compatible_projection_random() {
        let mut rng = rng(26);
        for n in 2..9 {
            for rank in 0..=n {
                let a = PsdMatrix::new(random_psd(&mut rng, n, rank), &tol()).unwrap();
                let k = (rank + 1) % (n + 1);
                let s = random_subspace(&mut rng, n, k);
                let e = compatible_projection(&a, &s, &tol()).unwrap();
                let m = e.matrix();
                assert!(e.idempotency_residual() < 1e-10);
                let skew = a.matrix() * m - m.transpose() * a.matrix();
                assert!(op_norm(&skew) <= 1e-10 * a.norm().max(1.0) * op_norm(m).max(1.0));
                assert!(range_of(m, &tol()).unwrap().equals(&s, &tol()).unwrap());
            }
        }
    }

    #[test]
    fn projection_solution_examples() {
        let a = diag(&[1.0, 0.0]);
        let b = diag(&[0.0, 1.0]);
        let q = projection_solution(&a, &b, &tol()).unwrap();
        assert!(close(q.matrix(), &a, 1e-15));

        let a = m2([1.0, 1.0, 1.0, 1.0]);
        let b = m2([1.0, 0.0, 1.0, 0.0]);
        let q = projection_solution(&a, &b, &tol()).unwrap();
        assert!(close(q.matrix(), &m2([0.0, 0.0, 1.0, 1.0]), 1e-14));
        assert!(close(&((&a + &b) * q.matrix()), &a, 1e-14));
        assert!(q.idempotency_residual() < 1e-15);

        let i = DenseMatrix::identity(2, 2);
        assert!(matches!(
            projection_solution(&i, &i, &tol()),
            Err(Error::PreconditionViolated { .. })
        ));
    }
}
