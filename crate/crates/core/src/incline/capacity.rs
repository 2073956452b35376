use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::exact;

/// Counting bounds for dimension `d`, each rounded toward zero from the
/// exact rational value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub d: u64,
    /// `(100/91)^d / 2`: minimum size of a `9/10`-net of the unit sphere of `ℝ^d`.
    pub net_lower_bound: f64,
    /// `(100/91)^d / 8`: family sizes below this admit an inclined vector in `ℂ^d`.
    pub inclined_capacity: f64,
}

impl CapacityReport {
    /// Exact test of `n < (100/91)^d / 8`.
    pub fn admits(&self, n: u64) -> bool {
        let lhs = BigInt::from(8u64) * BigInt::from(n) * BigInt::from(91u32).pow(self.d as u32);
        lhs < BigInt::from(100u32).pow(self.d as u32)
    }
}

pub fn capacity(d: u64) -> CapacityReport {
    let growth = exact::pow(&exact::ratio(100, 91), d);
    let net = &growth / BigRational::from_integer(BigInt::from(2));
    let inclined = &growth / BigRational::from_integer(BigInt::from(8));
    CapacityReport {
        d,
        net_lower_bound: exact::to_f64_floor(&net),
        inclined_capacity: exact::to_f64_floor(&inclined),
    }
}

/// `(99/100)^d`, the volume fraction of the ball of radius `99/100`.
pub fn shell_fraction(d: u64) -> f64 {
    exact::pow(&exact::ratio(99, 100), d)
        .to_f64()
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_factor() {
        let r = capacity(1);
        assert!((r.net_lower_bound - 50.0 / 91.0).abs() < 1e-15);
        assert!(r.net_lower_bound <= 50.0 / 91.0);
        assert_eq!(r.inclined_capacity, r.net_lower_bound / 4.0);
    }

    #[test]
    fn dimension_128() {
        let r = capacity(128);
        // Oracle: 128 squarings/multiplications in f64 agree to ~1e-13 relative.
        let approx = (100.0f64 / 91.0).powi(128) / 8.0;
        assert!((r.inclined_capacity - approx).abs() / approx < 1e-12);
        assert!(r.inclined_capacity > 2.18e4 && r.inclined_capacity < 2.19e4);
        assert_eq!(r.inclined_capacity * 4.0, r.net_lower_bound);
        assert!(r.admits(1000));
        assert!(r.admits(21858));
        assert!(!r.admits(21859));
    }

    #[test]
    fn shell_fraction_at_threshold() {
        assert!((shell_fraction(128) - 0.276251668).abs() < 1e-9);
        assert!(shell_fraction(128) <= 0.5);
    }
}
