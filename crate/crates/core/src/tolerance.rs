//! The single place where rank, angle and ordering thresholds are decided.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiplier on unit roundoff for the adaptive rank threshold.
pub const RANK_EPS_FACTOR: f64 = 64.0;

/// Thresholds governing every rank decision, subspace comparison and
/// Löwner-order test in the crate.
///
/// When no explicit relative rank tolerance is set, singular values are
/// truncated below `64 · ε · max(m, n) · σ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceContext {
    rank_rel_tol: Option<f64>,
    angle_tol: f64,
    loewner_tol: f64,
    psd_clip_tol: f64,
}

impl Default for ToleranceContext {
    fn default() -> Self {
        Self {
            rank_rel_tol: None,
            angle_tol: 1e-8,
            loewner_tol: 1e-10,
            psd_clip_tol: 1e-12,
        }
    }
}

fn check(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 && value < 1e-2 {
        Ok(value)
    } else {
        Err(Error::InvalidTolerance { name, value })
    }
}

impl ToleranceContext {
    pub fn new(rank_rel_tol: Option<f64>, angle_tol: f64, loewner_tol: f64, psd_clip_tol: f64) -> Result<Self> {
        if let Some(r) = rank_rel_tol {
            check("rank_rel_tol", r)?;
        }
        Ok(Self {
            rank_rel_tol,
            angle_tol: check("angle_tol", angle_tol)?,
            loewner_tol: check("loewner_tol", loewner_tol)?,
            psd_clip_tol: check("psd_clip_tol", psd_clip_tol)?,
        })
    }

    pub fn with_rank_rel_tol(self, value: f64) -> Result<Self> {
        Ok(Self {
            rank_rel_tol: Some(check("rank_rel_tol", value)?),
            ..self
        })
    }

    pub fn with_angle_tol(self, value: f64) -> Result<Self> {
        Ok(Self {
            angle_tol: check("angle_tol", value)?,
            ..self
        })
    }

    pub fn with_loewner_tol(self, value: f64) -> Result<Self> {
        Ok(Self {
            loewner_tol: check("loewner_tol", value)?,
            ..self
        })
    }

    /// Relative singular-value cutoff for an `rows × cols` operand.
    pub fn rank_rel_tol(&self, rows: usize, cols: usize) -> f64 {
        self.rank_rel_tol
            .unwrap_or_else(|| RANK_EPS_FACTOR * f64::EPSILON * rows.max(cols).max(1) as f64)
    }

    /// `true` when the rank tolerance is the adaptive default.
    pub fn has_adaptive_rank_tol(&self) -> bool {
        self.rank_rel_tol.is_none()
    }

    pub fn angle_tol(&self) -> f64 {
        self.angle_tol
    }

    pub fn loewner_tol(&self) -> f64 {
        self.loewner_tol
    }

    pub fn psd_clip_tol(&self) -> f64 {
        self.psd_clip_tol
    }
}
