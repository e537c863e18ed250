//! Dense-matrix operator calculus on finite-dimensional real inner-product
//! spaces: shorted operators, parallel sums, range additivity,
//! compatibility, oblique projections and the pseudoinverse of a
//! rank-additive sum.

pub mod bench;
pub mod error;
pub mod ff_update;
pub mod generators;
pub mod numeric;
pub mod projections;
pub mod psd;
pub mod range_calculus;
pub mod shorted;
pub mod subspace;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::{loewner_leq, op_norm, pinv, svd_rank, DenseMatrix, SvdRank};
pub use psd::{sqrt_psd, PsdMatrix};
pub use subspace::{nullspace_of, preimage, range_of, Subspace};
pub use tolerance::ToleranceContext;
