//! Multi-start minimax search over the complex unit sphere.
//!
//! The objective is `max_j q_j(x)` for Hermitian forms `q_j(x) = x* M_j x`
//! normalized so that `q_j ≤ 1` on unit vectors. Each restart draws a random
//! unit vector and then descends a softmax-smoothed version of the maximum,
//! renormalizing after every step. Restart `r` owns iterations
//! `[r·S, (r+1)·S)` of the budget and its own derived seed, so the winning
//! restart (lowest index reaching the target) and its iteration count do not
//! depend on how restarts are scheduled across threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hilbert::{check_dims, dot, random_unit_vector_with, ComplexVector};
use crate::rng;

/// Iterations owned by one restart.
const RESTART_ITERATIONS: u64 = 64;
/// Restarts evaluated concurrently.
const WAVE: u64 = 8;

/// Certificates must clear their bound by this much.
pub const SUCCESS_MARGIN: f64 = 1e-9;

pub(crate) trait QuadraticFamily: Sync {
    fn dim(&self) -> usize;

    fn len(&self) -> usize;

    /// Writes `q_j(x)` for every member into `out`.
    fn values(&self, x: &[Complex64], out: &mut Vec<f64>);

    /// `grad += Σ w · M_j x` over the `(j, w)` pairs.
    fn add_weighted_gradient(&self, x: &[Complex64], weights: &[(usize, f64)], grad: &mut [Complex64]);
}

/// `q_j(x) = |⟨x, u_j⟩|²` for unit vectors `u_j`.
pub(crate) struct RankOneFamily {
    dim: usize,
    units: Vec<Complex64>,
}

impl RankOneFamily {
    /// Normalizes the inputs and drops zero vectors.
    pub fn new(dim: usize, vectors: impl IntoIterator<Item = Vec<Complex64>>) -> Self {
        let mut units = Vec::new();
        for v in vectors {
            debug_assert_eq!(v.len(), dim);
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n > 0.0 {
                units.extend(v.iter().map(|z| z / n));
            }
        }
        RankOneFamily { dim, units }
    }
}

impl QuadraticFamily for RankOneFamily {
    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.units.len() / self.dim
    }

    fn values(&self, x: &[Complex64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.units.chunks_exact(self.dim).map(|u| dot(x, u).norm_sqr()));
    }

    fn add_weighted_gradient(&self, x: &[Complex64], weights: &[(usize, f64)], grad: &mut [Complex64]) {
        for &(j, w) in weights {
            let u = &self.units[j * self.dim..(j + 1) * self.dim];
            let c = dot(x, u) * w;
            for (g, uk) in grad.iter_mut().zip(u) {
                *g += c * uk;
            }
        }
    }
}

/// `q_k(x) = x* G_k x / tr G_k` for positive semidefinite `G_k`.
pub(crate) struct GramFamily {
    dim: usize,
    mats: Vec<Complex64>,
}

impl GramFamily {
    /// Each entry is a row-major `dim × dim` positive semidefinite matrix;
    /// zero-trace matrices are dropped.
    pub fn new(dim: usize, mats: impl IntoIterator<Item = Vec<Complex64>>) -> Self {
        let mut out = Vec::new();
        for m in mats {
            debug_assert_eq!(m.len(), dim * dim);
            let tr: f64 = (0..dim).map(|i| m[i * dim + i].re).sum();
            if tr > 0.0 {
                out.extend(m.iter().map(|z| z / tr));
            }
        }
        GramFamily { dim, mats: out }
    }

    fn apply(&self, k: usize, x: &[Complex64], out: &mut [Complex64], scale: f64) {
        let d = self.dim;
        let m = &self.mats[k * d * d..(k + 1) * d * d];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &m[i * d..(i + 1) * d];
            let s: Complex64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            *o += s * scale;
        }
    }
}

impl QuadraticFamily for GramFamily {
    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.mats.len() / (self.dim * self.dim)
    }

    fn values(&self, x: &[Complex64], out: &mut Vec<f64>) {
        out.clear();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.dim];
        for k in 0..self.len() {
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            self.apply(k, x, &mut buf, 1.0);
            out.push(dot(&buf, x).re.max(0.0));
        }
    }

    fn add_weighted_gradient(&self, x: &[Complex64], weights: &[(usize, f64)], grad: &mut [Complex64]) {
        for &(k, w) in weights {
            self.apply(k, x, grad, w);
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SearchOutcome {
    /// Unit vector with the smallest objective seen.
    pub x: Vec<Complex64>,
    /// Objective at `x`, i.e. `max_j q_j(x)`.
    pub value: f64,
    pub iterations: u64,
    pub success: bool,
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

fn normalize_in_place(x: &mut [Complex64]) -> bool {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    x.iter_mut().for_each(|z| *z /= n);
    true
}

fn run_restart<F: QuadraticFamily>(
    family: &F,
    target: f64,
    allotment: u64,
    seed: u64,
    restart: u64,
) -> SearchOutcome {
    let dim = family.dim();
    let mut rng = rng::derived_rng(seed, "restart", restart);
    let mut x = random_unit_vector_with(dim, &mut rng)
        .expect("dimension is positive")
        .into_entries();
    let mut vals = Vec::with_capacity(family.len());
    family.values(&x, &mut vals);
    let mut fx = max_of(&vals);
    let mut used = 1;
    let mut eta = 0.5;
    let mut cand_vals = Vec::with_capacity(family.len());
    let mut grad = vec![Complex64::new(0.0, 0.0); dim];

    while fx > target && used < allotment {
        let beta = 30.0 / fx.max(1e-12);
        let cutoff = fx - 12.0 / beta;
        let mut weights: Vec<(usize, f64)> = vals
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v >= cutoff)
            .map(|(j, &v)| (j, (beta * (v - fx)).exp()))
            .collect();
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        weights.iter_mut().for_each(|(_, w)| *w /= total);

        grad.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        family.add_weighted_gradient(&x, &weights, &mut grad);
        // Keep only the component orthogonal to x.
        let along = dot(&grad, &x);
        for (g, xi) in grad.iter_mut().zip(&x) {
            *g -= along * xi;
        }
        if grad.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-30 {
            break;
        }

        let mut cand: Vec<Complex64> = x.iter().zip(&grad).map(|(a, g)| a - g * eta).collect();
        if !normalize_in_place(&mut cand) {
            break;
        }
        family.values(&cand, &mut cand_vals);
        used += 1;
        let fc = max_of(&cand_vals);
        if fc < fx {
            x = cand;
            fx = fc;
            std::mem::swap(&mut vals, &mut cand_vals);
            eta = (eta * 1.5).min(4.0);
        } else {
            eta *= 0.5;
            if eta < 1e-9 {
                break;
            }
        }
    }

    SearchOutcome {
        success: fx <= target,
        x,
        value: fx,
        iterations: used,
    }
}

/// Minimizes `max_j q_j` over the unit sphere until it is `≤ target` or the
/// budget runs out.
pub(crate) fn minimax_search<F: QuadraticFamily>(
    family: &F,
    target: f64,
    budget: u64,
    seed: u64,
) -> SearchOutcome {
    let restarts = budget.div_ceil(RESTART_ITERATIONS).max(1);
    let allotment = |r: u64| RESTART_ITERATIONS.min(budget.saturating_sub(r * RESTART_ITERATIONS)).max(1);

    let mut best: Option<SearchOutcome> = None;
    let mut spent = 0u64;
    let mut start = 0u64;
    while start < restarts {
        let end = (start + WAVE).min(restarts);
        let wave: Vec<SearchOutcome> = (start..end)
            .into_par_iter()
            .map(|r| run_restart(family, target, allotment(r), seed, r))
            .collect();
        for outcome in wave {
            spent += outcome.iterations;
            if outcome.success {
                return SearchOutcome {
                    iterations: spent,
                    ..outcome
                };
            }
            if best.as_ref().is_none_or(|b| outcome.value < b.value) {
                best = Some(outcome);
            }
        }
        start = end;
    }
    let best = best.expect("at least one restart runs");
    SearchOutcome {
        iterations: spent,
        ..best
    }
}

/// Search parameters for [`search_inclined_vector`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Target `c` for `max_j |⟨x, x_j⟩| / ‖x_j‖`.
    pub bound: f64,
    /// Total objective evaluations across all restarts.
    pub budget: u64,
    pub seed: u64,
}

/// A unit vector together with its verified inclination against a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclinationCertificate {
    pub d: usize,
    pub family_digest: String,
    pub candidate: ComplexVector,
    /// `max_j |⟨candidate, x_j⟩| / ‖x_j‖` over the nonzero inputs.
    pub achieved: f64,
    pub bound: f64,
    pub seed: u64,
    pub iterations_used: u64,
    /// `achieved ≤ bound − SUCCESS_MARGIN`.
    pub passed: bool,
}

impl InclinationCertificate {
    /// Recomputes everything the certificate claims from the input family.
    pub fn verify(&self, vectors: &[ComplexVector]) -> Result<()> {
        if vectors_digest(vectors) != self.family_digest {
            return Err(Error::CertificateMismatch("family digest differs".into()));
        }
        if self.candidate.dim() != self.d {
            return Err(Error::CertificateMismatch(format!(
                "candidate has dimension {}, certificate says {}",
                self.candidate.dim(),
                self.d
            )));
        }
        if (self.candidate.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::CertificateMismatch("candidate is not a unit vector".into()));
        }
        let achieved = max_normalized_inner(&self.candidate, vectors)?;
        if (achieved - self.achieved).abs() > 1e-10 {
            return Err(Error::CertificateMismatch(format!(
                "recomputed achieved {achieved:.12} differs from recorded {:.12}",
                self.achieved
            )));
        }
        let passes = achieved <= self.bound - SUCCESS_MARGIN;
        if passes != self.passed {
            return Err(Error::CertificateMismatch("pass flag disagrees with achieved value".into()));
        }
        if !passes {
            return Err(Error::CertificateMismatch(format!(
                "achieved {achieved:.12} exceeds bound {}",
                self.bound
            )));
        }
        Ok(())
    }
}

/// SHA-256 (hex) of the canonical JSON encoding of a vector list.
pub fn vectors_digest(vectors: &[ComplexVector]) -> String {
    let bytes = serde_json::to_vec(vectors).expect("vectors serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// `max_j |⟨x, x_j⟩| / ‖x_j‖` over nonzero `x_j`, computed directly.
pub fn max_normalized_inner(x: &ComplexVector, vectors: &[ComplexVector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for v in vectors {
        check_dims(x.dim(), v.dim())?;
        let n = v.norm();
        if n == 0.0 {
            continue;
        }
        worst = worst.max(dot(x.entries(), v.entries()).norm() / n);
    }
    Ok(worst)
}

/// Runs the search and returns a certificate whether or not the bound was met.
pub fn search_inclined_vector(
    dim: usize,
    vectors: &[ComplexVector],
    config: SearchConfig,
) -> Result<InclinationCertificate> {
    if dim == 0 {
        return Err(Error::OutOfRange("dimension must be positive".into()));
    }
    if !(config.bound > 0.0 && config.bound < 1.0) {
        return Err(Error::OutOfRange(format!("bound {} not in (0, 1)", config.bound)));
    }
    if config.budget == 0 {
        return Err(Error::OutOfRange("budget must be positive".into()));
    }
    for v in vectors {
        check_dims(dim, v.dim())?;
    }
    let family = RankOneFamily::new(dim, vectors.iter().map(|v| v.entries().to_vec()));
    let target = (config.bound - SUCCESS_MARGIN).max(0.0);
    let outcome = minimax_search(&family, target * target, config.budget, config.seed);

    let candidate = ComplexVector::new(outcome.x)?.normalized()?;
    let achieved = max_normalized_inner(&candidate, vectors)?;
    Ok(InclinationCertificate {
        d: dim,
        family_digest: vectors_digest(vectors),
        candidate,
        achieved,
        bound: config.bound,
        seed: config.seed,
        iterations_used: outcome.iterations,
        passed: achieved <= target,
    })
}

/// Finds a unit `x` with `|⟨x, x_j⟩| ≤ c‖x_j‖` for every input.
///
/// `BudgetExhausted` only means this search did not find one.
pub fn find_inclined_vector(
    vectors: &[ComplexVector],
    c: f64,
    budget: u64,
    seed: u64,
) -> Result<InclinationCertificate> {
    let dim = vectors
        .first()
        .map(ComplexVector::dim)
        .ok_or_else(|| Error::OutOfRange("empty vector family has no dimension".into()))?;
    let cert = search_inclined_vector(dim, vectors, SearchConfig { bound: c, budget, seed })?;
    if cert.passed {
        Ok(cert)
    } else {
        Err(Error::BudgetExhausted {
            iterations: cert.iterations_used,
            best: cert.achieved,
            bound: c,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{random_unit_vector, rank_one_apply};

    #[test]
    fn single_constraint_in_c2() {
        let e0 = ComplexVector::basis(2, 0).unwrap();
        let cert = find_inclined_vector(std::slice::from_ref(&e0), 0.9, 1000, 1).unwrap();
        cert.verify(&[e0]).unwrap();
        assert!(cert.achieved <= 0.9 - SUCCESS_MARGIN);
    }

    #[test]
    fn orthogonal_pair_in_c2() {
        let fam = vec![ComplexVector::basis(2, 0).unwrap(), ComplexVector::basis(2, 1).unwrap()];
        let cert = find_inclined_vector(&fam, 0.9, 1000, 3).unwrap();
        // Minimax floor: any unit x has max(|x_0|, |x_1|) ≥ 1/√2.
        assert!(cert.achieved >= std::f64::consts::FRAC_1_SQRT_2 - 1e-12);
        assert!(cert.achieved <= 0.9);
        cert.verify(&fam).unwrap();
    }

    #[test]
    fn infeasible_bound_exhausts_budget() {
        let fam = vec![ComplexVector::basis(2, 0).unwrap(), ComplexVector::basis(2, 1).unwrap()];
        match find_inclined_vector(&fam, 0.0001, 200, 3) {
            Err(Error::BudgetExhausted { iterations, best, .. }) => {
                assert!(iterations <= 200);
                assert!(best >= std::f64::consts::FRAC_1_SQRT_2 - 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_vectors_impose_nothing() {
        let fam = vec![ComplexVector::zeros(3).unwrap()];
        let cert = find_inclined_vector(&fam, 0.5, 10, 0).unwrap();
        assert_eq!(cert.achieved, 0.0);
        assert_eq!(cert.iterations_used, 1);
    }

    #[test]
    fn argument_errors() {
        let fam = vec![ComplexVector::basis(2, 0).unwrap()];
        assert!(find_inclined_vector(&[], 0.9, 10, 0).is_err());
        assert!(find_inclined_vector(&fam, 1.0, 10, 0).is_err());
        assert!(find_inclined_vector(&fam, 0.0, 10, 0).is_err());
        assert!(find_inclined_vector(&fam, 0.9, 0, 0).is_err());
        let mixed = vec![ComplexVector::basis(2, 0).unwrap(), ComplexVector::basis(3, 0).unwrap()];
        assert!(matches!(
            find_inclined_vector(&mixed, 0.9, 10, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn deterministic_and_sound() {
        let fam: Vec<_> = (0..40).map(|s| random_unit_vector(4, s).unwrap()).collect();
        let a = find_inclined_vector(&fam, 0.8, 5000, 17).unwrap();
        let b = find_inclined_vector(&fam, 0.8, 5000, 17).unwrap();
        assert_eq!(a, b);
        a.verify(&fam).unwrap();
        // ‖R_x(x_j)‖² ≤ achieved² ‖x_j‖².
        for v in &fam {
            let r = rank_one_apply(&a.candidate, v).unwrap();
            assert!(r.norm_sqr() <= a.achieved * a.achieved * v.norm_sqr() + 1e-12);
        }
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let fam: Vec<_> = (0..10).map(|s| random_unit_vector(3, s).unwrap()).collect();
        let cert = find_inclined_vector(&fam, 0.95, 2000, 2).unwrap();
        let mut bad = cert.clone();
        bad.achieved *= 0.5;
        assert!(bad.verify(&fam).is_err());
        let mut other = fam.clone();
        other.pop();
        assert!(cert.verify(&other).is_err());
        let mut wrong = cert.clone();
        wrong.candidate = fam[0].clone();
        assert!(wrong.verify(&fam).is_err());
    }

    #[test]
    fn gram_family_matches_rank_one_family() {
        let vs: Vec<_> = (0..5).map(|s| random_unit_vector(3, s).unwrap()).collect();
        let r1 = RankOneFamily::new(3, vs.iter().map(|v| v.entries().to_vec()));
        let gram = GramFamily::new(
            3,
            vs.iter().map(|v| {
                let e = v.entries();
                (0..9).map(|k| e[k / 3] * e[k % 3].conj()).collect::<Vec<_>>()
            }),
        );
        let x = random_unit_vector(3, 99).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        r1.values(x.entries(), &mut a);
        gram.values(x.entries(), &mut b);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-14);
        }
    }
}
