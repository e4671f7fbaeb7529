//! Exact rational scalars.
//!
//! Every frequency endpoint in the engine is a [`Rational`]. Selection
//! compares intervals by nesting, and a nesting verdict that flipped under
//! float rounding would change which reference class wins, so nothing in the
//! decision path is ever converted to floating point.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

pub type Rational = BigRational;

/// Builds `n/d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses the scalar syntax accepted by the knowledge-base language:
/// a fraction `n/d`, an integer, or a decimal literal. Decimals convert
/// exactly (`0.3` is three tenths, not the nearest double).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let numer: BigInt = n.trim().parse().ok()?;
        let denom: BigInt = d.trim().parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        return Some(Rational::new(numer, denom));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return None;
        }
        let whole_part: BigInt = if whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().ok()?
        };
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().ok()?;
        return Some(Rational::new(whole_part * &scale + frac_part, scale));
    }
    let n: BigInt = text.parse().ok()?;
    Some(Rational::from(n))
}
