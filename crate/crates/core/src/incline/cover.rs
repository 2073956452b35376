use serde::{Deserialize, Serialize};

use super::{real_distance, realify};
use crate::error::{Error, Result};
use crate::hilbert::ComplexVector;
use crate::rng;

/// Outcome of a covering-witness search. A missing witness is not a proof
/// that the points cover the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub dim: usize,
    pub radius: f64,
    pub trials_used: u64,
    /// A unit vector farther than `radius` from every point, re-verified.
    pub witness: Option<Vec<f64>>,
    /// Distance from the witness (or from the best sample) to the nearest point.
    pub best_min_distance: f64,
}

/// Samples unit vectors uniformly on the sphere of `ℝ^dim` looking for one
/// whose distance to every point exceeds `radius`. Points are normalized;
/// zero points are discarded.
pub fn cover_witness(points: &[Vec<f64>], radius: f64, trials: u64, seed: u64) -> Result<CoverReport> {
    let dim = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::OutOfRange("point set is empty".into()))?;
    if dim == 0 {
        return Err(Error::InvalidVector("points must have positive dimension".into()));
    }
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::OutOfRange(format!("radius {radius} must be positive")));
    }
    let mut units: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidVector("point entries must be finite".into()));
        }
        let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            units.push(p.iter().map(|x| x / n).collect());
        }
    }
    if units.is_empty() {
        return Err(Error::ZeroVector);
    }

    let nearest = |y: &[f64]| {
        units
            .iter()
            .map(|u| real_distance(y, u))
            .fold(f64::INFINITY, f64::min)
    };

    let mut report = CoverReport {
        dim,
        radius,
        trials_used: 0,
        witness: None,
        best_min_distance: 0.0,
    };
    // Unit vectors are never more than 2 apart.
    if radius >= 2.0 {
        return Ok(report);
    }
    let mut rng = rng::derived_rng(seed, "cover", 0);
    for _ in 0..trials {
        report.trials_used += 1;
        let mut y: Vec<f64> = (0..dim).map(|_| rng::real_gaussian(&mut rng)).collect();
        let n = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            continue;
        }
        y.iter_mut().for_each(|x| *x /= n);
        let dist = nearest(&y);
        report.best_min_distance = report.best_min_distance.max(dist);
        if dist > radius {
            // Recompute from scratch before reporting.
            if nearest(&y) > radius {
                report.best_min_distance = dist;
                report.witness = Some(y);
                break;
            }
        }
    }
    Ok(report)
}

/// [`cover_witness`] for complex points, on their realifications.
pub fn cover_witness_complex(
    points: &[ComplexVector],
    radius: f64,
    trials: u64,
    seed: u64,
) -> Result<CoverReport> {
    let real: Vec<Vec<f64>> = points.iter().map(realify).collect();
    cover_witness(&real, radius, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_has_a_witness() {
        let r = cover_witness(&[vec![1.0, 0.0, 0.0]], 0.9, 1000, 1).unwrap();
        let w = r.witness.expect("witness");
        assert!((w.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(real_distance(&w, &[1.0, 0.0, 0.0]) > 0.9);
    }

    #[test]
    fn diameter_radius_never_has_a_witness() {
        let r = cover_witness(&[vec![1.0, 0.0]], 2.0, 1000, 1).unwrap();
        assert!(r.witness.is_none());
    }

    #[test]
    fn dense_circle() {
        let pts: Vec<Vec<f64>> = (0..100)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 100.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let r = cover_witness(&pts, 0.9, 100_000, 5).unwrap();
        assert!(r.witness.is_none());
        assert_eq!(r.trials_used, 100_000);
        // Farthest point from the net is halfway between neighbours: 2 sin(π/200).
        assert!(r.best_min_distance <= 2.0 * (std::f64::consts::PI / 200.0).sin() + 1e-12);
    }

    #[test]
    fn complex_points_are_realified() {
        let p = ComplexVector::basis(2, 0).unwrap();
        let r = cover_witness_complex(&[p], 0.9, 1000, 3).unwrap();
        assert_eq!(r.dim, 4);
        assert!(r.witness.is_some());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(cover_witness(&[], 0.9, 10, 0).is_err());
        assert!(cover_witness(&[vec![1.0]], 0.0, 10, 0).is_err());
        assert!(cover_witness(&[vec![1.0], vec![1.0, 0.0]], 0.5, 10, 0).is_err());
        assert!(cover_witness(&[vec![0.0, 0.0]], 0.5, 10, 0).is_err());
    }
}
