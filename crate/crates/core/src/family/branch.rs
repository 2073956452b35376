//! Branch projections `P_α = ⊕_m (I ⊗ … ⊗ R_{v_m} ⊗ … ⊗ I)` with `R_{v_m}`
//! on axis `α|m` of level `m`, their construction against a basis, the
//! diagonal-suppression certificate, and common fixed vectors of several
//! branches.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::leakage::{level_leakage_sets, LevelLeakage};
use super::stage::{Regime, StageBasis, StageParameters};
use crate::error::{Error, Result};
use crate::hilbert::{check_dims, dot, random_unit_vector_with, ComplexVector, Projection};
use crate::incline::{minimax_search, GramFamily, RankOneFamily, SUCCESS_MARGIN};
use crate::projection::{project_blocks, projected_norm_sqr, ProductProjection};
use crate::rng;

/// Diagonal values recomputed by a verifier must match the certificate to this.
pub const DIAGONAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchLevel {
    pub m: u32,
    /// `α|m`, the axis of level `m` carrying the rank-one factor.
    pub sigma: String,
    /// Unit vector of length `d_m`.
    pub direction: ComplexVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBranch", into = "RawBranch")]
pub struct BranchProjection {
    stage: StageParameters,
    branch: String,
    levels: Vec<BranchLevel>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBranch {
    stage: StageParameters,
    branch: String,
    levels: Vec<BranchLevel>,
}

impl TryFrom<RawBranch> for BranchProjection {
    type Error = Error;

    fn try_from(raw: RawBranch) -> Result<Self> {
        let depth = raw.stage.depth() as usize;
        if raw.levels.len() != depth {
            return Err(Error::InvalidBranch(format!(
                "{} levels given for a stage of depth {depth}",
                raw.levels.len()
            )));
        }
        for (i, level) in raw.levels.iter().enumerate() {
            if level.m as usize != i + 1 {
                return Err(Error::InvalidBranch(format!("level {} listed at position {}", level.m, i + 1)));
            }
            if raw.branch.get(..i + 1) != Some(level.sigma.as_str()) {
                return Err(Error::InvalidBranch(format!(
                    "level {} axis `{}` is not the prefix of branch `{}`",
                    level.m, level.sigma, raw.branch
                )));
            }
        }
        BranchProjection::new(
            raw.stage,
            &raw.branch,
            raw.levels.into_iter().map(|l| l.direction).collect(),
        )
    }
}

impl From<BranchProjection> for RawBranch {
    fn from(p: BranchProjection) -> Self {
        RawBranch {
            stage: p.stage,
            branch: p.branch,
            levels: p.levels,
        }
    }
}

fn check_branch(branch: &str, depth: u32) -> Result<()> {
    if !branch.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidBranch(format!("`{branch}` is not a binary string")));
    }
    if branch.len() < depth as usize {
        return Err(Error::InvalidBranch(format!(
            "`{branch}` is shorter than the stage depth {depth}"
        )));
    }
    Ok(())
}

impl BranchProjection {
    /// `directions[m-1]` is `v_m`; each is normalized.
    pub fn new(stage: StageParameters, branch: &str, directions: Vec<ComplexVector>) -> Result<Self> {
        check_branch(branch, stage.depth())?;
        if directions.len() != stage.depth() as usize {
            return Err(Error::InvalidBranch(format!(
                "{} directions given for a stage of depth {}",
                directions.len(),
                stage.depth()
            )));
        }
        let levels = directions
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let m = i as u32 + 1;
                check_dims(stage.level(m)?.d, v.dim())?;
                Ok(BranchLevel {
                    m,
                    sigma: branch[..i + 1].to_string(),
                    direction: v.normalized()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BranchProjection {
            stage,
            branch: branch.to_string(),
            levels,
        })
    }

    pub fn stage(&self) -> &StageParameters {
        &self.stage
    }

    pub fn branch(&self) -> &str {
        &self.branch
    }

    pub fn levels(&self) -> &[BranchLevel] {
        &self.levels
    }

    /// Applies only the level-`m` factor to a level-space vector.
    pub fn apply_level(&self, m: u32, y: &ComplexVector) -> Result<ComplexVector> {
        let space = self.stage.space(m)?;
        check_dims(space.dim(), y.dim())?;
        let level = &self.levels[m as usize - 1];
        let mut out = y.entries().to_vec();
        project_blocks(space.layout(&level.sigma)?, level.direction.entries(), &mut out);
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    /// `⟨P e, e⟩`.
    pub fn diagonal(&self, e: &ComplexVector) -> Result<f64> {
        let pe = self.apply(e)?;
        Ok(dot(pe.entries(), e.entries()).re)
    }
}

impl Projection for BranchProjection {
    fn dim(&self) -> usize {
        self.stage.dim()
    }

    fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.stage.dim(), x.dim())?;
        let mut out = x.entries().to_vec();
        for level in &self.levels {
            let range = self.stage.level_range(level.m)?;
            let layout = self.stage.space(level.m)?.layout(&level.sigma)?;
            project_blocks(layout, level.direction.entries(), &mut out[range]);
        }
        Ok(ComplexVector::from_vec_unchecked(out))
    }
}

/// Per-index diagonal values of a branch projection against a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuppressionCertificate {
    pub regime: Regime,
    pub basis_digest: String,
    pub branch: String,
    /// `⟨P_α e_k, e_k⟩` for every basis index `k`.
    pub diagonals: Vec<f64>,
    pub max_diagonal: f64,
    pub bound: f64,
    /// `max_diagonal ≤ bound`.
    pub passed: bool,
}

impl SuppressionCertificate {
    /// Checks a recorded certificate against a fresh recomputation.
    pub fn check_against(&self, fresh: &SuppressionCertificate) -> Result<()> {
        if self.basis_digest != fresh.basis_digest {
            return Err(Error::CertificateMismatch("basis digest differs".into()));
        }
        if self.branch != fresh.branch || self.regime != fresh.regime {
            return Err(Error::CertificateMismatch("branch or regime differs".into()));
        }
        if self.diagonals.len() != fresh.diagonals.len() {
            return Err(Error::CertificateMismatch("number of diagonal entries differs".into()));
        }
        if let Some((k, (a, b))) = self
            .diagonals
            .iter()
            .zip(&fresh.diagonals)
            .enumerate()
            .find(|(_, (a, b))| (*a - *b).abs() > DIAGONAL_TOLERANCE)
        {
            return Err(Error::CertificateMismatch(format!(
                "diagonal {k}: recorded {a:.12}, recomputed {b:.12}"
            )));
        }
        if (self.max_diagonal - fresh.max_diagonal).abs() > DIAGONAL_TOLERANCE {
            return Err(Error::CertificateMismatch("max diagonal differs".into()));
        }
        Ok(())
    }
}

/// Recomputes every diagonal entry of `spec` in `basis` and compares the
/// maximum with `bound`.
pub fn verify_suppression(spec: &BranchProjection, basis: &StageBasis, bound: f64) -> Result<SuppressionCertificate> {
    if spec.stage() != basis.stage() {
        return Err(Error::StageMismatch("projection and basis live on different stages".into()));
    }
    let diagonals = basis
        .vectors()
        .par_iter()
        .map(|e| spec.diagonal(e))
        .collect::<Result<Vec<_>>>()?;
    let max_diagonal = diagonals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SuppressionCertificate {
        regime: spec.stage().regime(),
        basis_digest: basis.digest().to_string(),
        branch: spec.branch().to_string(),
        max_diagonal,
        bound,
        passed: max_diagonal <= bound,
        diagonals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelRoute {
    /// No basis vector leaks into this level; any direction works.
    Unconstrained,
    /// Inclined against every block `Q_m e_k (s)` separately.
    Blocks,
    /// Inclined against each `Q_m e_k` as a whole (sum over its blocks).
    Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub m: u32,
    pub sigma: String,
    pub leakage_size: usize,
    pub route: LevelRoute,
    /// `max_{k ∈ X_m} ‖P_m Q_m e_k‖² / ‖Q_m e_k‖²`.
    pub achieved_ratio: f64,
    pub iterations_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    /// Target for the squared ratio `‖P_m Q_m e_k‖² / ‖Q_m e_k‖²`; the
    /// certified diagonal bound is `(1 + rho) / 2`.
    pub rho: f64,
    /// Search budget per level and route.
    pub budget: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchBuild {
    pub projection: BranchProjection,
    pub levels: Vec<LevelReport>,
    pub certificate: SuppressionCertificate,
}

/// `(1 + rho) / 2`.
pub fn suppression_bound(rho: f64) -> f64 {
    (1.0 + rho) / 2.0
}

struct LevelBuild {
    direction: ComplexVector,
    report: LevelReport,
}

fn build_level(
    basis: &StageBasis,
    leakage: &LevelLeakage,
    m: u32,
    sigma: &str,
    config: BuildConfig,
) -> Result<LevelBuild> {
    let stage = basis.stage();
    let space = stage.space(m)?;
    let layout = space.layout(sigma)?;
    let d = space.alphabet_size();
    let range = stage.level_range(m)?;
    let members: Vec<&[Complex64]> = leakage.sets[m as usize - 1]
        .iter()
        .map(|&k| &basis.vectors()[k].entries()[range.clone()])
        .collect();

    let blocks_of = |y: &[Complex64]| -> Vec<Vec<Complex64>> {
        (0..layout.block_count())
            .map(|block| {
                let base = layout.block_base(block);
                (0..d).map(|b| y[base + b * layout.stride]).collect()
            })
            .collect()
    };

    let (direction, route, iterations) = if members.is_empty() {
        let mut rng = rng::derived_rng(config.seed, "level", u64::from(m));
        (random_unit_vector_with(d, &mut rng)?, LevelRoute::Unconstrained, 0)
    } else {
        let c = config.rho.sqrt() - SUCCESS_MARGIN;
        let family = RankOneFamily::new(d, members.iter().flat_map(|y| blocks_of(y)));
        let found = minimax_search(
            &family,
            c * c,
            config.budget,
            rng::derive_seed(config.seed, "level", u64::from(m)),
        );
        if found.success {
            (ComplexVector::new(found.x)?.normalized()?, LevelRoute::Blocks, found.iterations)
        } else {
            let grams = members.iter().map(|y| {
                let mut g = vec![Complex64::new(0.0, 0.0); d * d];
                for block in blocks_of(y) {
                    for i in 0..d {
                        for j in 0..d {
                            g[i * d + j] += block[i] * block[j].conj();
                        }
                    }
                }
                g
            });
            let family = GramFamily::new(d, grams);
            let target = config.rho - SUCCESS_MARGIN;
            let agg = minimax_search(
                &family,
                target,
                config.budget,
                rng::derive_seed(config.seed, "level-aggregate", u64::from(m)),
            );
            if !agg.success {
                return Err(Error::LevelBudgetExhausted {
                    level: m,
                    best: agg.value,
                    target: config.rho,
                });
            }
            (
                ComplexVector::new(agg.x)?.normalized()?,
                LevelRoute::Aggregate,
                found.iterations + agg.iterations,
            )
        }
    };

    let achieved_ratio = members
        .iter()
        .map(|y| {
            let total: f64 = y.iter().map(|z| z.norm_sqr()).sum();
            projected_norm_sqr(layout, direction.entries(), y) / total
        })
        .fold(0.0, f64::max);
    if achieved_ratio > config.rho {
        return Err(Error::LevelBudgetExhausted {
            level: m,
            best: achieved_ratio,
            target: config.rho,
        });
    }
    Ok(LevelBuild {
        direction,
        report: LevelReport {
            m,
            sigma: sigma.to_string(),
            leakage_size: members.len(),
            route,
            achieved_ratio,
            iterations_used: iterations,
        },
    })
}

/// Chooses `v_m` on every level so that each leaking basis vector keeps at
/// most a `rho` share of its level mass, then certifies the diagonal bound
/// `(1 + rho)/2`. Level `m` draws its randomness from `(seed, m)` only, so
/// branches sharing a prefix get identical directions on shared levels.
pub fn build_branch_projection(basis: &StageBasis, branch: &str, config: BuildConfig) -> Result<BranchBuild> {
    let stage = basis.stage();
    check_branch(branch, stage.depth())?;
    if !(config.rho > 0.0 && config.rho < 1.0) {
        return Err(Error::OutOfRange(format!("rho = {} not in (0, 1)", config.rho)));
    }
    if config.budget == 0 {
        return Err(Error::OutOfRange("budget must be positive".into()));
    }
    let leakage = level_leakage_sets(basis)?;
    let built = (1..=stage.depth())
        .into_par_iter()
        .map(|m| build_level(basis, &leakage, m, &branch[..m as usize], config))
        .collect::<Result<Vec<_>>>()?;
    let (directions, levels): (Vec<_>, Vec<_>) =
        built.into_iter().map(|b| (b.direction, b.report)).unzip();
    let projection = BranchProjection::new(stage.clone(), branch, directions)?;
    let certificate = verify_suppression(&projection, basis, suppression_bound(config.rho))?;
    Ok(BranchBuild {
        projection,
        levels,
        certificate,
    })
}

/// A unit vector fixed by every branch projection in a set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionWitness {
    /// First level where all prefixes are distinct.
    pub level: u32,
    pub branches: Vec<String>,
    pub vector: ComplexVector,
    /// `‖P_α w − w‖` for each branch, in input order.
    pub residuals: Vec<f64>,
}

/// First level `m` at which the prefixes `α_j|m` are pairwise distinct.
pub fn separating_level(specs: &[BranchProjection]) -> Result<u32> {
    let depth = specs
        .first()
        .map(|s| s.stage().depth())
        .ok_or_else(|| Error::InvalidBranch("no branches given".into()))?;
    for m in 1..=depth as usize {
        let mut prefixes: Vec<&str> = specs.iter().map(|s| &s.branch()[..m]).collect();
        prefixes.sort_unstable();
        if prefixes.windows(2).all(|w| w[0] != w[1]) {
            return Ok(m as u32);
        }
    }
    let m = depth as usize;
    for (i, a) in specs.iter().enumerate() {
        for b in &specs[i + 1..] {
            if a.branch()[..m] == b.branch()[..m] {
                return Err(Error::NoSeparatingLevel {
                    depth,
                    first: a.branch().to_string(),
                    second: b.branch().to_string(),
                });
            }
        }
    }
    unreachable!("prefixes at full depth collide only if some pair does")
}

/// Joint fixed vector of `∏_j P_{σ_j, v_m^{(j)}}` at the separating level,
/// embedded into the stage. Axes of that level not used by any branch carry
/// the uniform direction.
pub fn branch_intersection(specs: &[BranchProjection]) -> Result<IntersectionWitness> {
    let first = specs
        .first()
        .ok_or_else(|| Error::InvalidBranch("no branches given".into()))?;
    let stage = first.stage();
    if specs.iter().any(|s| s.stage() != stage) {
        return Err(Error::StageMismatch("branches live on different stages".into()));
    }
    let m = separating_level(specs)?;
    let space = stage.space(m)?;
    let d = space.alphabet_size();
    let uniform = ComplexVector::new(vec![Complex64::new(1.0, 0.0); d])?.normalized()?;
    let directions: Vec<(String, ComplexVector)> = space
        .axes()
        .iter()
        .map(|axis| {
            let v = specs
                .iter()
                .map(|s| &s.levels()[m as usize - 1])
                .find(|l| &l.sigma == axis)
                .map(|l| l.direction.clone())
                .unwrap_or_else(|| uniform.clone());
            (axis.clone(), v)
        })
        .collect();
    let product = ProductProjection::new(space.clone(), directions)?;
    let vector = stage.embed(m, &product.joint_fixed_vector()?)?;
    let residuals = specs
        .iter()
        .map(|s| s.apply(&vector)?.distance(&vector))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntersectionWitness {
        level: m,
        branches: specs.iter().map(|s| s.branch().to_string()).collect(),
        vector,
        residuals,
    })
}
