//! The level-size predicate `32 m² (d^{2^m})² d^{2^m − 1} < (100/91)^d`,
//! decided in integers as `32 m² d^{3·2^m − 1} · 91^d < 100^d`.

use num_bigint::BigInt;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest alphabet size a paper-regime level may use.
pub const MIN_ALPHABET: u64 = 128;

/// Largest level and alphabet size the exact predicate will evaluate.
pub const MAX_LEVEL: u32 = 16;
pub const MAX_ALPHABET: u64 = 1 << 20;

fn check_alphabet(d: u64) -> Result<()> {
    if d > MAX_ALPHABET {
        return Err(Error::OutOfRange(format!("alphabet size {d} exceeds {MAX_ALPHABET}")));
    }
    Ok(())
}

/// One exact evaluation of the predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateEval {
    pub m: u32,
    pub d: u64,
    /// `32 m² d^{3·2^m − 1}` in decimal.
    pub polynomial: String,
    /// `⌊(100/91)^d⌋` in decimal.
    pub exponential_floor: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterTrace {
    pub m: u32,
    pub d_min: u64,
    /// `d_min − 1`, absent when the scan succeeded at its first candidate.
    pub last_failing: Option<PredicateEval>,
    pub first_success: PredicateEval,
}

fn exponent(m: u32) -> Result<u32> {
    if m == 0 {
        return Err(Error::OutOfRange("level m must be at least 1".into()));
    }
    if m > MAX_LEVEL {
        return Err(Error::OutOfRange(format!("level m = {m} exceeds {MAX_LEVEL}")));
    }
    Ok(3 * (1u32 << m) - 1)
}

fn polynomial(m: u32, d: u64, k: u32) -> BigInt {
    BigInt::from(32u64 * u64::from(m) * u64::from(m)) * BigInt::from(d).pow(k)
}

/// Exact evaluation at `(m, d)`.
pub fn level_predicate(m: u32, d: u64) -> Result<PredicateEval> {
    let k = exponent(m)?;
    check_alphabet(d)?;
    let poly = polynomial(m, d, k);
    let p91 = BigInt::from(91u32).pow(d as u32);
    let p100 = BigInt::from(100u32).pow(d as u32);
    let holds = &poly * &p91 < p100;
    Ok(PredicateEval {
        m,
        d,
        polynomial: poly.to_string(),
        exponential_floor: (&p100 / &p91).to_string(),
        holds,
    })
}

pub fn predicate_holds(m: u32, d: u64) -> Result<bool> {
    let k = exponent(m)?;
    check_alphabet(d)?;
    let lhs = polynomial(m, d, k) * BigInt::from(91u32).pow(d as u32);
    Ok(lhs < BigInt::from(100u32).pow(d as u32))
}

/// Smallest `d ≥ 128` satisfying the predicate, by upward scan.
pub fn min_level_dimension(m: u32) -> Result<u64> {
    let k = exponent(m)?;
    let mut d = MIN_ALPHABET;
    let mut p91 = BigInt::from(91u32).pow(d as u32);
    let mut p100 = BigInt::from(100u32).pow(d as u32);
    loop {
        check_alphabet(d)?;
        if polynomial(m, d, k) * &p91 < p100 {
            return Ok(d);
        }
        d += 1;
        p91 *= 91u32;
        p100 *= 100u32;
    }
}

pub fn parameter_trace(m: u32) -> Result<ParameterTrace> {
    let d_min = min_level_dimension(m)?;
    let last_failing = if d_min > MIN_ALPHABET {
        Some(level_predicate(m, d_min - 1)?)
    } else {
        None
    };
    Ok(ParameterTrace {
        m,
        d_min,
        last_failing,
        first_success: level_predicate(m, d_min)?,
    })
}
