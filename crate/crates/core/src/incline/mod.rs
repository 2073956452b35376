//! Inclined directions: vectors whose normalized inner product with every
//! member of a finite family stays below a bound.
//!
//! Contains the realification used to move between `ℂ^d` and `ℝ^{2d}`
//! (`x_k = z_{2k} + i z_{2k+1}`), the parallelogram/polarization bound, the
//! capacity arithmetic for the `(100/91)^d` counting bounds, a certified
//! multi-start search, and an empirical covering-witness search.

mod capacity;
mod cover;
mod search;

pub use capacity::{capacity, shell_fraction, CapacityReport};
pub use cover::{cover_witness, cover_witness_complex, CoverReport};
pub(crate) use search::{minimax_search, GramFamily, RankOneFamily};
pub use search::{
    find_inclined_vector, max_normalized_inner, search_inclined_vector, vectors_digest,
    InclinationCertificate, SearchConfig, SUCCESS_MARGIN,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::ComplexVector;

/// `x ↦ (Re x_0, Im x_0, Re x_1, Im x_1, …)`.
pub fn realify(x: &ComplexVector) -> Vec<f64> {
    x.entries().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Inverse of [`realify`].
pub fn complexify(z: &[f64]) -> Result<ComplexVector> {
    if z.is_empty() || !z.len().is_multiple_of(2) {
        return Err(Error::InvalidVector(format!(
            "real vector of length {} has no complex counterpart",
            z.len()
        )));
    }
    ComplexVector::new(
        z.chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect(),
    )
}

/// Realifications of `x, −x, ix, −ix`, in that order.
pub fn four_copies(x: &ComplexVector) -> [Vec<f64>; 4] {
    let i = Complex64::new(0.0, 1.0);
    [
        realify(x),
        realify(&x.scale(Complex64::new(-1.0, 0.0))),
        realify(&x.scale(i)),
        realify(&x.scale(-i)),
    ]
}

/// `√2 · (1 − ε²/2)`: the bound on `|⟨x, y⟩|` for unit `x, y` with
/// `‖x ± y‖, ‖x ± iy‖ ≥ ε`. Defined for `0 ≤ ε ≤ √2`.
pub fn inclination_bound(eps: f64) -> Result<f64> {
    let max = std::f64::consts::SQRT_2;
    if !(0.0..=max).contains(&eps) {
        return Err(Error::OutOfRange(format!("eps = {eps} not in [0, √2]")));
    }
    Ok((max * (1.0 - eps * eps / 2.0)).max(0.0))
}

pub(crate) fn real_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{inner, random_unit_vector};

    #[test]
    fn realify_examples() {
        let one = ComplexVector::new(vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(realify(&one), vec![1.0, 0.0]);
        let i = ComplexVector::new(vec![Complex64::new(0.0, 1.0)]).unwrap();
        assert_eq!(realify(&i), vec![0.0, 1.0]);
        let z = ComplexVector::new(vec![Complex64::new(0.6, 0.8)]).unwrap();
        assert_eq!(realify(&z), vec![0.6, 0.8]);
        assert!((real_distance(&realify(&z), &[0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(complexify(&realify(&z)).unwrap(), z);
        assert!(complexify(&[1.0, 2.0, 3.0]).is_err());
        assert!(complexify(&[]).is_err());
    }

    #[test]
    fn four_copies_of_one() {
        let one = ComplexVector::new(vec![Complex64::new(1.0, 0.0)]).unwrap();
        let c = four_copies(&one);
        assert_eq!(c[0], vec![1.0, 0.0]);
        assert_eq!(c[1], vec![-1.0, 0.0]);
        assert_eq!(c[2], vec![0.0, 1.0]);
        assert_eq!(c[3], vec![-0.0, -1.0]);
    }

    #[test]
    fn four_copies_preserve_distances() {
        for seed in 0..20 {
            let x = random_unit_vector(5, seed).unwrap();
            let y = random_unit_vector(5, 100 + seed).unwrap();
            let rx = realify(&x);
            let copies = four_copies(&y);
            let i = Complex64::new(0.0, 1.0);
            let complex_side = [
                x.distance(&y).unwrap(),
                x.distance(&y.scale(Complex64::new(-1.0, 0.0))).unwrap(),
                x.distance(&y.scale(i)).unwrap(),
                x.distance(&y.scale(-i)).unwrap(),
            ];
            for (copy, expected) in copies.iter().zip(complex_side) {
                assert!((real_distance(&rx, copy) - expected).abs() < 1e-12);
                assert!((real_distance(copy, &[0.0; 10]) - 1.0).abs() < 1e-12);
            }
            // First-slot linearity survives realification as Re⟨x, y⟩ = z·w.
            let dot: f64 = rx.iter().zip(&copies[0]).map(|(a, b)| a * b).sum();
            assert!((dot - inner(&x, &y).unwrap().re).abs() < 1e-12);
        }
    }

    #[test]
    fn inclination_bound_values() {
        let v = inclination_bound(0.9).unwrap();
        assert!((v - std::f64::consts::SQRT_2 * 0.595).abs() < 1e-15);
        assert!(v <= 0.9);
        assert_eq!(inclination_bound(0.0).unwrap(), std::f64::consts::SQRT_2);
        assert!(inclination_bound(std::f64::consts::SQRT_2).unwrap().abs() < 1e-15);
        assert!(inclination_bound(-0.1).is_err());
        assert!(inclination_bound(1.5).is_err());
        let mut prev = f64::INFINITY;
        for k in 0..=100 {
            let e = std::f64::consts::SQRT_2 * k as f64 / 100.0;
            let b = inclination_bound(e).unwrap();
            assert!(b <= prev);
            prev = b;
        }
    }
}
