//! Exact rational helpers for bounds that must not be decided by rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn pow(base: &BigRational, exp: u64) -> BigRational {
    let mut result = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    result
}

/// Largest `f64` not exceeding `q` (for `q ≥ 0`); saturates at `f64::MAX`.
pub fn to_f64_floor(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let mut f = q.to_f64().unwrap_or(f64::MAX);
    if !f.is_finite() {
        f = f64::MAX;
    }
    // `to_f64` rounds to nearest, so at most a step or two of correction.
    while f > 0.0 {
        match BigRational::from_float(f) {
            Some(exact) if exact > *q => f = f.next_down(),
            _ => break,
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_conversion_never_overshoots() {
        for (n, d) in [(1i64, 3i64), (2, 3), (50, 91), (10, 1), (1, 1 << 40)] {
            let q = ratio(n, d);
            let f = to_f64_floor(&q);
            assert!(BigRational::from_float(f).unwrap() <= q);
            assert!(BigRational::from_float(f.next_up()).unwrap() > q);
        }
        let huge = pow(&ratio(100, 91), 20_000);
        assert_eq!(to_f64_floor(&huge), f64::MAX);
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let b = ratio(100, 91);
        let mut acc = BigRational::one();
        for e in 0..40u64 {
            assert_eq!(pow(&b, e), acc);
            acc *= &b;
        }
    }
}
