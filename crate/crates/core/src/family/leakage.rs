//! Leakage sets: basis indices whose vectors put a large share of their mass
//! into a given subspace.

use serde::{Deserialize, Serialize};

use super::stage::{StageBasis, BASIS_TOLERANCE};
use crate::error::{Error, Result};
use crate::hilbert::{gram_residual, ComplexVector, Projection, SubspaceProjection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageSet {
    pub eps: f64,
    pub rank: usize,
    /// `{k : ‖P_F e_k‖² ≥ eps}`, ascending.
    pub indices: Vec<usize>,
    /// `‖P_F e_k‖²` for every `k`.
    pub leakage: Vec<f64>,
}

impl LeakageSet {
    /// `r² / eps`.
    pub fn size_bound(&self) -> f64 {
        (self.rank * self.rank) as f64 / self.eps
    }
}

/// The indices `k` with `‖P_F(e_k)‖² ≥ eps`; every other index leaks less
/// than `eps` into `F`.
pub fn leakage_set(basis: &[ComplexVector], subspace: &SubspaceProjection, eps: f64) -> Result<LeakageSet> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::OutOfRange(format!("eps = {eps} must be positive")));
    }
    let residual = gram_residual(basis);
    if residual > BASIS_TOLERANCE {
        return Err(Error::NotOrthonormal {
            residual,
            tolerance: BASIS_TOLERANCE,
        });
    }
    let leakage = basis
        .iter()
        .map(|e| subspace.apply(e).map(|p| p.norm_sqr()))
        .collect::<Result<Vec<_>>>()?;
    let indices = leakage
        .iter()
        .enumerate()
        .filter(|(_, &l)| l >= eps)
        .map(|(k, _)| k)
        .collect();
    Ok(LeakageSet {
        eps,
        rank: subspace.rank(),
        indices,
        leakage,
    })
}

/// `3 / (π² m²)`.
pub fn level_threshold(m: u32) -> f64 {
    let m = f64::from(m);
    3.0 / (std::f64::consts::PI * std::f64::consts::PI * m * m)
}

/// Per-level leakage of a stage basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelLeakage {
    /// `thresholds[m-1] = 3/(π² m²)`.
    pub thresholds: Vec<f64>,
    /// `sets[m-1] = X_m = {k : ‖Q_m e_k‖² > 3/(π² m²)}`, ascending.
    pub sets: Vec<Vec<usize>>,
    /// `mass[k][m-1] = ‖Q_m e_k‖²`.
    pub mass: Vec<Vec<f64>>,
}

impl LevelLeakage {
    pub fn contains(&self, m: u32, k: usize) -> bool {
        self.sets[m as usize - 1].binary_search(&k).is_ok()
    }

    /// `Σ_{m : k ∉ X_m} ‖Q_m e_k‖²`.
    pub fn off_leakage_mass(&self, k: usize) -> f64 {
        self.mass[k]
            .iter()
            .enumerate()
            .filter(|&(i, _)| !self.contains(i as u32 + 1, k))
            .map(|(_, &w)| w)
            .sum()
    }
}

pub fn level_leakage_sets(basis: &StageBasis) -> Result<LevelLeakage> {
    let stage = basis.stage();
    let depth = stage.depth();
    let thresholds: Vec<f64> = (1..=depth).map(level_threshold).collect();
    let ranges = (1..=depth)
        .map(|m| stage.level_range(m))
        .collect::<Result<Vec<_>>>()?;
    let mass: Vec<Vec<f64>> = basis
        .vectors()
        .iter()
        .map(|e| {
            ranges
                .iter()
                .map(|r| e.entries()[r.clone()].iter().map(|z| z.norm_sqr()).sum())
                .collect()
        })
        .collect();
    let sets = (0..depth as usize)
        .map(|i| {
            mass.iter()
                .enumerate()
                .filter(|(_, w)| w[i] > thresholds[i])
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    Ok(LevelLeakage {
        thresholds,
        sets,
        mass,
    })
}
