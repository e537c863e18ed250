//! Timing of the update formula against recomputing `(A+B)†` from scratch.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::ff_update::{ff_update, relative_error};
use crate::generators::{rank_additive_pair, rng, trial_seed};
use crate::numeric::{pinv, DenseMatrix};
use crate::tolerance::ToleranceContext;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchBlock {
    pub dim: usize,
    pub trials: usize,
    pub ff_ns: Vec<u64>,
    pub recompute_ns: Vec<u64>,
    pub max_rel_error: f64,
}

impl BenchBlock {
    pub fn ff_median(&self) -> Option<u64> {
        percentile(&self.ff_ns, 50.0)
    }

    pub fn recompute_median(&self) -> Option<u64> {
        percentile(&self.recompute_ns, 50.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BenchReport {
    pub blocks: Vec<BenchBlock>,
}

impl BenchReport {
    pub fn max_rel_error(&self) -> f64 {
        self.blocks.iter().map(|b| b.max_rel_error).fold(0.0, f64::max)
    }
}

/// Nearest-rank percentile, `p` in `[0, 100]`.
pub fn percentile(samples: &[u64], p: f64) -> Option<u64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Low-rank split used for a benchmark dimension: each summand has rank
/// about a quarter of `dim`.
fn ranks_for(dim: usize) -> (usize, usize) {
    let ra = (dim / 4).max(1).min(dim);
    let rb = (dim / 4).max(1).min(dim - ra);
    (ra, rb)
}

fn elapsed_ns(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX)
}

/// For each dimension, times the update formula (given `A†` and `B†`, but
/// charged for building `S` and `T`) against `pinv(A+B)` on rank-additive
/// pairs, and records the largest relative disagreement.
pub fn bench_update_vs_recompute(
    dims: &[usize],
    trials: usize,
    seed: u64,
    tol: &ToleranceContext,
) -> Result<BenchReport> {
    let mut blocks = Vec::with_capacity(dims.len());
    for (d_index, &dim) in dims.iter().enumerate() {
        let mut block = BenchBlock {
            dim,
            trials,
            ff_ns: Vec::with_capacity(trials),
            recompute_ns: Vec::with_capacity(trials),
            max_rel_error: 0.0,
        };
        let (ra, rb) = ranks_for(dim);
        for t in 0..trials {
            let mut g = rng(trial_seed(seed, (d_index * trials + t) as u64));
            let (a, b) = rank_additive_pair(&mut g, dim, ra, rb);
            let a_pinv = pinv(&a, tol)?;
            let b_pinv = pinv(&b, tol)?;

            let start = Instant::now();
            let updated = ff_update(&a, &b, &a_pinv, &b_pinv, tol)?;
            block.ff_ns.push(elapsed_ns(start));

            let start = Instant::now();
            let sum: DenseMatrix = &a + &b;
            let direct = pinv(&sum, tol)?;
            block.recompute_ns.push(elapsed_ns(start));

            block.max_rel_error = block.max_rel_error.max(relative_error(&updated, &direct));
        }
        blocks.push(block);
    }
    Ok(BenchReport { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_report() {
        let r = bench_update_vs_recompute(&[8], 10, 1, &ToleranceContext::default()).unwrap();
        assert_eq!(r.blocks.len(), 1);
        assert_eq!(r.blocks[0].ff_ns.len(), 10);
        assert_eq!(r.blocks[0].recompute_ns.len(), 10);
        assert!(r.max_rel_error() <= 1e-9);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with("[{\"dim\":8,\"trials\":10,\"ff_ns\":["));
    }

    #[test]
    fn empty_reports() {
        let tol = ToleranceContext::default();
        let r = bench_update_vs_recompute(&[8, 16], 0, 1, &tol).unwrap();
        assert_eq!(r.blocks.len(), 2);
        assert!(r.blocks.iter().all(|b| b.ff_ns.is_empty() && b.max_rel_error == 0.0));
        let r = bench_update_vs_recompute(&[], 5, 1, &tol).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), "[]");
    }

    #[test]
    fn percentiles() {
        assert_eq!(percentile(&[], 50.0), None);
        assert_eq!(percentile(&[5, 1, 3], 50.0), Some(3));
        assert_eq!(percentile(&[5, 1, 3], 100.0), Some(5));
        assert_eq!(percentile(&[5, 1, 3], 0.0), Some(1));
    }
}
