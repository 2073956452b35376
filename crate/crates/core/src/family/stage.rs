use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::params::{predicate_holds, min_level_dimension, MIN_ALPHABET};
use crate::error::{Error, Result};
use crate::hilbert::{gram_residual, ComplexVector};
use crate::incline::vectors_digest;
use crate::index::TensorIndexSpace;

/// How level alphabet sizes were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Sizes satisfy the counting predicate, so inclined directions exist.
    Paper,
    /// Small user-chosen sizes; directions are only as good as the search.
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    pub m: u32,
    pub d: usize,
}

/// Levels `m = 1..=M`; level `m` is `ℓ₂(B^A)` with `A = {0,1}^m` and `|B| = d_m`.
/// The stage is their direct sum, level 1 first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStage", into = "RawStage")]
pub struct StageParameters {
    regime: Regime,
    levels: Vec<LevelSpec>,
    spaces: Vec<TensorIndexSpace>,
    offsets: Vec<usize>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStage {
    regime: Regime,
    levels: Vec<LevelSpec>,
}

impl TryFrom<RawStage> for StageParameters {
    type Error = Error;

    fn try_from(raw: RawStage) -> Result<Self> {
        StageParameters::new(raw.regime, raw.levels)
    }
}

impl From<StageParameters> for RawStage {
    fn from(s: StageParameters) -> Self {
        RawStage {
            regime: s.regime,
            levels: s.levels,
        }
    }
}

impl StageParameters {
    pub fn new(regime: Regime, levels: Vec<LevelSpec>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidStage("at least one level is required".into()));
        }
        let mut spaces = Vec::with_capacity(levels.len());
        let mut offsets = Vec::with_capacity(levels.len());
        let mut dim = 0usize;
        for (i, level) in levels.iter().enumerate() {
            if level.m as usize != i + 1 {
                return Err(Error::InvalidStage(format!(
                    "levels must be numbered 1, 2, …; found m = {} at position {}",
                    level.m,
                    i + 1
                )));
            }
            if level.d == 0 {
                return Err(Error::InvalidStage(format!("level {} has alphabet size 0", level.m)));
            }
            let space = TensorIndexSpace::binary_axes(level.m, level.d)
                .map_err(|e| Error::InvalidStage(e.to_string()))?;
            if regime == Regime::Paper {
                if (level.d as u64) < MIN_ALPHABET {
                    return Err(Error::InvalidStage(format!(
                        "paper regime requires d ≥ {MIN_ALPHABET}; level {} has {}",
                        level.m, level.d
                    )));
                }
                if !predicate_holds(level.m, level.d as u64)? {
                    return Err(Error::InvalidStage(format!(
                        "level {} with d = {} fails the size predicate",
                        level.m, level.d
                    )));
                }
            }
            offsets.push(dim);
            dim = dim
                .checked_add(space.dim())
                .ok_or_else(|| Error::InvalidStage("stage dimension overflows".into()))?;
            spaces.push(space);
        }
        Ok(StageParameters {
            regime,
            levels,
            spaces,
            offsets,
            dim,
        })
    }

    pub fn toy(alphabet_sizes: &[usize]) -> Result<Self> {
        Self::new(
            Regime::Toy,
            alphabet_sizes
                .iter()
                .enumerate()
                .map(|(i, &d)| LevelSpec { m: i as u32 + 1, d })
                .collect(),
        )
    }

    /// Paper-regime stage of depth `depth` with minimal admissible sizes.
    pub fn paper(depth: u32) -> Result<Self> {
        let levels = (1..=depth)
            .map(|m| {
                Ok(LevelSpec {
                    m,
                    d: usize::try_from(min_level_dimension(m)?)
                        .map_err(|_| Error::InvalidStage("alphabet size overflows".into()))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(Regime::Paper, levels)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn levels(&self) -> &[LevelSpec] {
        &self.levels
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    /// `Σ_m d_m^{2^m}`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn slot(&self, m: u32) -> Result<usize> {
        if m == 0 || m > self.depth() {
            return Err(Error::OutOfRange(format!("level {m} not in 1..={}", self.depth())));
        }
        Ok(m as usize - 1)
    }

    pub fn level(&self, m: u32) -> Result<LevelSpec> {
        Ok(self.levels[self.slot(m)?])
    }

    pub fn space(&self, m: u32) -> Result<&TensorIndexSpace> {
        Ok(&self.spaces[self.slot(m)?])
    }

    /// Coordinates of level `m` inside the stage vector.
    pub fn level_range(&self, m: u32) -> Result<Range<usize>> {
        let i = self.slot(m)?;
        Ok(self.offsets[i]..self.offsets[i] + self.spaces[i].dim())
    }

    /// `Q_m x` as a level-space vector.
    pub fn level_part(&self, x: &ComplexVector, m: u32) -> Result<ComplexVector> {
        crate::hilbert::check_dims(self.dim, x.dim())?;
        Ok(ComplexVector::from_vec_unchecked(
            x.entries()[self.level_range(m)?].to_vec(),
        ))
    }

    /// Places a level-space vector into the stage, zero elsewhere.
    pub fn embed(&self, m: u32, y: &ComplexVector) -> Result<ComplexVector> {
        let range = self.level_range(m)?;
        crate::hilbert::check_dims(range.len(), y.dim())?;
        let mut out = vec![num_complex::Complex64::new(0.0, 0.0); self.dim];
        out[range].copy_from_slice(y.entries());
        Ok(ComplexVector::from_vec_unchecked(out))
    }
}

/// Orthonormality tolerance for bases.
pub const BASIS_TOLERANCE: f64 = 1e-8;

/// An orthonormal basis of a stage space, validated once.
#[derive(Debug, Clone, PartialEq)]
pub struct StageBasis {
    stage: StageParameters,
    vectors: Vec<ComplexVector>,
    digest: String,
}

impl StageBasis {
    pub fn new(stage: StageParameters, vectors: Vec<ComplexVector>) -> Result<Self> {
        if vectors.len() != stage.dim() {
            return Err(Error::StageMismatch(format!(
                "stage dimension is {} but the basis has {} vectors",
                stage.dim(),
                vectors.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != stage.dim()) {
            return Err(Error::StageMismatch(format!(
                "stage dimension is {} but a basis vector has dimension {}",
                stage.dim(),
                v.dim()
            )));
        }
        let residual = gram_residual(&vectors);
        if residual > BASIS_TOLERANCE {
            return Err(Error::NotOrthonormal {
                residual,
                tolerance: BASIS_TOLERANCE,
            });
        }
        let digest = vectors_digest(&vectors);
        Ok(StageBasis {
            stage,
            vectors,
            digest,
        })
    }

    pub fn standard(stage: StageParameters) -> Result<Self> {
        let n = stage.dim();
        let vectors = (0..n)
            .map(|k| ComplexVector::basis(n, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(stage, vectors)
    }

    /// Haar-random basis with seed `derive_seed(seed, "basis", 0)`.
    pub fn random(stage: StageParameters, seed: u64) -> Result<Self> {
        let vectors = crate::hilbert::random_orthonormal_basis(
            stage.dim(),
            crate::rng::derive_seed(seed, "basis", 0),
        )?;
        Self::new(stage, vectors)
    }

    pub fn stage(&self) -> &StageParameters {
        &self.stage
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }
}
