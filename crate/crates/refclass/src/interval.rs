//! Closed frequency intervals and the strength order on them.
//!
//! A statistic reports a frequency as a closed interval `[lo, hi]` inside
//! `[0, 1]`. One interval is *stronger* than another when it is strictly
//! nested inside it: the nested interval says everything the wider one says
//! and more. Two intervals *disagree* when neither nests in the other, which
//! covers both disjoint intervals and partially overlapping ones. Nesting is
//! deliberately the only comparison used anywhere in selection; narrower but
//! shifted intervals are conflicting evidence, not better evidence.

use crate::rational::{one, zero, Rational};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntervalError {
    #[error("interval endpoints out of order: lo {lo} > hi {hi}")]
    Misordered { lo: Rational, hi: Rational },
    #[error("interval endpoint {value} outside [0, 1]")]
    OutOfRange { value: Rational },
}

/// A closed subinterval of `[0, 1]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

/// Outcome of comparing two intervals by strict nesting, read left to right:
/// `Stronger` means the left interval is strictly nested in the right one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StrengthOrder {
    Stronger,
    Weaker,
    Equal,
    Incomparable,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Interval, IntervalError> {
        if lo > hi {
            return Err(IntervalError::Misordered { lo, hi });
        }
        for end in [&lo, &hi] {
            if *end < zero() || *end > one() {
                return Err(IntervalError::OutOfRange { value: end.clone() });
            }
        }
        Ok(Interval { lo, hi })
    }

    /// The fully uninformative interval `[0, 1]`.
    pub fn vacuous() -> Interval {
        Interval { lo: zero(), hi: one() }
    }

    /// The degenerate interval `[r, r]`.
    pub fn point(r: Rational) -> Result<Interval, IntervalError> {
        Interval::new(r.clone(), r)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// `self` fits inside `other` (not necessarily strictly).
    pub fn nests_in(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Neither interval nests in the other.
    pub fn disagrees(&self, other: &Interval) -> bool {
        !self.nests_in(other) && !other.nests_in(self)
    }

    /// Strict-nesting comparison. Equal intervals are `Equal`, not stronger;
    /// overlapping-but-unnested intervals are `Incomparable`.
    pub fn stronger(&self, other: &Interval) -> StrengthOrder {
        if self == other {
            StrengthOrder::Equal
        } else if self.nests_in(other) {
            StrengthOrder::Stronger
        } else if other.nests_in(self) {
            StrengthOrder::Weaker
        } else {
            StrengthOrder::Incomparable
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
