//! Seeded random instances for property suites and benchmarks.
//!
//! Every generator controls conditioning: spectra are drawn from bounded
//! intervals and coupled frames keep principal angles away from zero, so
//! that rank decisions are unambiguous at the default tolerances.

use nalgebra::linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numeric::{diag, DenseMatrix};
use crate::subspace::Subspace;

pub type TrialRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; mixes a root seed with a trial index.
pub fn trial_seed(root: u64, index: u64) -> u64 {
    let mut z = root ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard Gaussian entries.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DenseMatrix {
    let qr = QR::new(random_matrix(rng, n, n));
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Uniformly distributed `k`-dimensional subspace of R^n.
pub fn random_subspace(rng: &mut impl Rng, n: usize, k: usize) -> Subspace {
    Subspace::from_orthonormal(random_orthogonal(rng, n).columns(0, k).into_owned())
}

/// Diagonal core with singular values in `[lo, hi]`, rotated on both sides.
pub fn random_core(rng: &mut impl Rng, r: usize, lo: f64, hi: f64) -> DenseMatrix {
    let d: Vec<f64> = (0..r).map(|_| rng.random_range(lo..=hi)).collect();
    let u = random_orthogonal(rng, r);
    let v = random_orthogonal(rng, r);
    u * diag(&d) * v.transpose()
}

/// PSD matrix of exact rank `rank` with nonzero eigenvalues in `[0.1, 1]`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> DenseMatrix {
    let q = random_orthogonal(rng, n);
    let frame = q.columns(0, rank);
    let d: Vec<f64> = (0..rank).map(|_| rng.random_range(0.1..=1.0)).collect();
    let m = frame * diag(&d) * frame.transpose();
    crate::numeric::symmetrize(&m)
}

/// `m × n` matrix of exact rank `r` with singular values in `[0.5, 2]`.
pub fn random_rank_matrix(rng: &mut impl Rng, m: usize, n: usize, r: usize) -> DenseMatrix {
    let x = random_orthogonal(rng, m).columns(0, r).into_owned();
    let y = random_orthogonal(rng, n).columns(0, r).into_owned();
    x * random_core(rng, r, 0.5, 2.0) * y.transpose()
}

/// Two frames of sizes `a` and `b` whose spans meet only in zero, with all
/// principal angles at least `atan(1/‖W‖)` for a coupling `W` of norm ≲ 1.
///
/// The first frame is orthonormal; the second is `Q₂ + Q₁W`.
fn coupled_frames(rng: &mut impl Rng, n: usize, a: usize, b: usize) -> (DenseMatrix, DenseMatrix) {
    assert!(a + b <= n);
    let q = random_orthogonal(rng, n);
    let first = q.columns(0, a).into_owned();
    let scale = 0.5 / ((a.max(1) as f64).sqrt() + (b.max(1) as f64).sqrt());
    let w = random_matrix(rng, a, b) * scale;
    let second = q.columns(a, b) + &first * w;
    (first, second)
}

fn maybe_swap(rng: &mut impl Rng, pair: (DenseMatrix, DenseMatrix)) -> (DenseMatrix, DenseMatrix) {
    if rng.random_bool(0.5) {
        (pair.1, pair.0)
    } else {
        pair
    }
}

/// Pair with `rk(A+B) = rk(A) + rk(B)`: ranges and adjoint ranges both
/// meet only in zero. Requires `ra + rb ≤ n`.
pub fn rank_additive_pair(rng: &mut impl Rng, n: usize, ra: usize, rb: usize) -> (DenseMatrix, DenseMatrix) {
    let (xa, xb) = frames_for(rng, n, ra, rb);
    let (ya, yb) = frames_for(rng, n, ra, rb);
    let a = &xa * random_core(rng, ra, 0.5, 2.0) * ya.transpose();
    let b = &xb * random_core(rng, rb, 0.5, 2.0) * yb.transpose();
    (a, b)
}

/// Coupled frames with a random choice of which side is orthonormal.
fn frames_for(rng: &mut impl Rng, n: usize, ra: usize, rb: usize) -> (DenseMatrix, DenseMatrix) {
    if rng.random_bool(0.5) {
        coupled_frames(rng, n, ra, rb)
    } else {
        let (p, q) = coupled_frames(rng, n, rb, ra);
        (q, p)
    }
}

/// Non-additive pair: `R(A) ∩ R(B) = {0}` while `R(Aᵀ) ∩ R(Bᵀ) ≠ {0}`,
/// i.e. `N(A) + N(B) ≠ H`, which rules out range additivity.
/// Needs `n ≥ 2`.
pub fn non_additive_pair(rng: &mut impl Rng, n: usize) -> (DenseMatrix, DenseMatrix) {
    assert!(n >= 2);
    let ra = rng.random_range(1..n);
    let rb = rng.random_range(1..=n - ra);
    let shared = rng.random_range(1..=ra.min(rb));
    let (xa, xb) = coupled_frames(rng, n, ra, rb);
    // adjoint frames: A uses q[0..ra], B uses q[0..shared] plus fresh directions
    let q = random_orthogonal(rng, n);
    let ya = q.columns(0, ra).into_owned();
    let fresh = rb - shared;
    let mut yb = DenseMatrix::zeros(n, rb);
    yb.columns_mut(0, shared).copy_from(&q.columns(0, shared));
    if fresh > 0 {
        let extra = if ra + fresh <= n {
            q.columns(ra, fresh).into_owned()
        } else {
            q.columns(shared, fresh).into_owned()
        };
        yb.columns_mut(shared, fresh).copy_from(&extra);
    }
    let a = &xa * random_core(rng, ra, 0.5, 2.0) * ya.transpose();
    let b = &xb * random_core(rng, rb, 0.5, 2.0) * yb.transpose();
    maybe_swap(rng, (a, b))
}

/// Non-additive pair with overlapping ranges: `B = C − A` with `rk C < rk A`,
/// so `R(A+B) = R(C)` is too small to hold `R(A)`.
pub fn cancelling_pair(rng: &mut impl Rng, n: usize) -> (DenseMatrix, DenseMatrix) {
    assert!(n >= 2);
    let ra = rng.random_range(2..=n);
    let rc = rng.random_range(0..ra);
    let a = random_rank_matrix(rng, n, n, ra);
    let c = random_rank_matrix(rng, n, n, rc);
    let b = c - &a;
    maybe_swap(rng, (a, b))
}

/// Pair of random ranks in general position; additive for
/// almost every draw, with overlapping ranges when `ra + rb > n`.
pub fn generic_pair(rng: &mut impl Rng, n: usize) -> (DenseMatrix, DenseMatrix) {
    let ra = rng.random_range(0..=n);
    let rb = rng.random_range(0..=n);
    (random_rank_matrix(rng, n, n, ra), random_rank_matrix(rng, n, n, rb))
}

/// Which generator produced a mixed-corpus pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    Generic,
    RankAdditive,
    Psd,
    NonAdditiveDisjoint,
    NonAdditiveCancelling,
}

impl PairKind {
    /// Whether the construction guarantees failure of range additivity.
    pub fn is_non_additive(self) -> bool {
        matches!(self, Self::NonAdditiveDisjoint | Self::NonAdditiveCancelling)
    }
}

/// Corpus for the range-additivity equivalence suites: 40% guaranteed
/// non-additive pairs, the rest split across additive constructions.
pub fn mixed_pair(rng: &mut impl Rng, n: usize) -> (PairKind, DenseMatrix, DenseMatrix) {
    let roll: f64 = rng.random();
    if roll < 0.25 {
        let (a, b) = non_additive_pair(rng, n);
        (PairKind::NonAdditiveDisjoint, a, b)
    } else if roll < 0.40 {
        let (a, b) = cancelling_pair(rng, n);
        (PairKind::NonAdditiveCancelling, a, b)
    } else if roll < 0.65 {
        let (a, b) = generic_pair(rng, n);
        (PairKind::Generic, a, b)
    } else if roll < 0.85 {
        let ra = rng.random_range(0..=n);
        let rb = rng.random_range(0..=n - ra);
        let (a, b) = rank_additive_pair(rng, n, ra, rb);
        (PairKind::RankAdditive, a, b)
    } else {
        let ra = rng.random_range(0..=n);
        let rb = rng.random_range(0..=n);
        (PairKind::Psd, random_psd(rng, n, ra), random_psd(rng, n, rb))
    }
}

/// Complementary pair `(M, N)` with `dim M = k` and every principal angle
/// between `M` and `N` at least `min_angle` (rejection sampled).
pub fn complementary_pair(rng: &mut impl Rng, n: usize, k: usize, min_angle: f64) -> (Subspace, Subspace) {
    loop {
        let m = random_subspace(rng, n, k);
        let nn = random_subspace(rng, n, n - k);
        let angles = m.principal_angles(&nn).expect("same ambient");
        // complementary iff no angle is zero; conditioning iff none is small
        if angles.first().is_none_or(|&a| a >= min_angle) {
            return (m, nn);
        }
    }
}
