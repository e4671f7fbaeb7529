//! Derived statistics for constructed classes.
//!
//! When no single reference class settles a question, the engine builds new
//! classes out of the ones that carry statistics and derives their intervals.
//!
//! Two constructions exist for a set of factor classes. The *product* class
//! treats the factors as independent coordinates; its frequency interval is
//! the componentwise product of the factor intervals. The *agreement* class
//! conditions that product on the factors all pointing the same way, which
//! is where the combination function [`g_combine`] comes from: for
//! frequencies `x` and `y` it returns the frequency of "both in the target"
//! among pairs where the two indicators agree,
//!
//! ```text
//! g(x, y) = x*y / (x*y + (1-x)*(1-y))
//! ```
//!
//! extended to n factors by multiplying odds, the only extension compatible
//! with combining pairwise. `g` is nondecreasing in each argument and has
//! `1/2` as its identity, so a maximally uninformative factor drops out. Its
//! one undefined point is mixed certainty (some factor exactly 1, another
//! exactly 0): the sources have asserted contradictory certainties and there
//! is no agreement region to condition on. That case is a hard error for the
//! caller to surface, never a quiet default value.
//!
//! Agreement classes over named factors are written as brackets: `[H,K]` is
//! the agreement class of `H` and `K`, `[D&H,K]` pairs the intersection
//! `D&H` with `K`. A bracket with one constituent is just that constituent's
//! intersection, which is why single-constituent brackets canonicalize away.

use crate::interval::Interval;
use crate::kb::StatIndex;
use crate::rational::{one, Rational};
use crate::term::{ClassTerm, NameSet};
use num::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombineError {
    #[error("cannot combine contradictory certainties (a factor at 1 against a factor at 0)")]
    DegenerateCertainty,
}

/// Frequency of "all factors in the target" conditioned on the factors
/// agreeing, for independent factors with the given frequencies.
pub fn g_combine(values: &[Rational]) -> Result<Rational, CombineError> {
    assert!(!values.is_empty(), "g_combine needs at least one value");
    let mut all_in = one();
    let mut all_out = one();
    for v in values {
        all_in *= v;
        all_out *= &(one() - v);
    }
    let agree = &all_in + &all_out;
    if agree.is_zero() {
        return Err(CombineError::DegenerateCertainty);
    }
    Ok(all_in / agree)
}

/// Interval for the product class of the factors: componentwise product.
/// Needs at least two factors; a one-factor "product" is just the factor.
pub fn isx_stat(factors: &[Interval]) -> Interval {
    assert!(factors.len() >= 2, "product construction needs at least two factors");
    let mut lo = one();
    let mut hi = one();
    for f in factors {
        lo *= f.lo();
        hi *= f.hi();
    }
    Interval::new(lo, hi).expect("products of [0,1] endpoints stay ordered in [0,1]")
}

/// Interval for the agreement class of the factors: `g` applied to the lower
/// endpoints and to the upper endpoints. Fails if either endpoint tuple has
/// contradictory certainties.
pub fn isxb_stat(factors: &[Interval]) -> Result<Interval, CombineError> {
    assert!(factors.len() >= 2, "agreement construction needs at least two factors");
    let lows: Vec<Rational> = factors.iter().map(|f| f.lo().clone()).collect();
    let highs: Vec<Rational> = factors.iter().map(|f| f.hi().clone()).collect();
    let lo = g_combine(&lows)?;
    let hi = g_combine(&highs)?;
    Ok(Interval::new(lo, hi).expect("g is monotone, so endpoint order is preserved"))
}

/// Statistic of a bracket class toward `target`, looked up constituent by
/// constituent. A single-constituent bracket is its intersection, so the
/// lookup is direct; multiple constituents combine with [`isxb_stat`].
/// `Ok(None)` means some constituent has no known statistic.
pub fn bracket_stat(
    bracket: &ClassTerm,
    target: &ClassTerm,
    stats: &StatIndex,
) -> Result<Option<Interval>, CombineError> {
    let mut factors = Vec::new();
    for constituent in bracket.constituents() {
        let class = ClassTerm::intersect(constituent);
        match stats.get(&class, target) {
            Some(interval) => factors.push(interval.clone()),
            None => return Ok(None),
        }
    }
    match factors.len() {
        1 => Ok(Some(factors.pop().unwrap())),
        _ => isxb_stat(&factors).map(Some),
    }
}

/// The bracket reflection rule: `a` reflects `b` when every constituent of
/// `b` fits inside some constituent of `a`. Coarser groupings over the same
/// or more material reflect finer ones; peers that split the material
/// differently reflect neither way.
pub fn bracket_reflects(a: &ClassTerm, b: &ClassTerm) -> bool {
    let holders = a.constituents();
    b.constituents()
        .iter()
        .all(|need| holders.iter().any(|have| need.iter().all(|n| have.contains(n))))
}

/// Every way to partition `names` into at most `max_blocks` constituents,
/// as canonical class terms. The one-block partition collapses to the plain
/// intersection; multi-block partitions are brackets. Partial-coverage
/// brackets are never candidates, so they are not enumerated here.
pub fn enumerate_brackets(names: &NameSet, max_blocks: usize) -> Vec<ClassTerm> {
    let names: Vec<&String> = names.iter().collect();
    if names.is_empty() || max_blocks == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    // Restricted growth strings: name i goes to block assign[i], and a new
    // block may only open right after the highest block so far.
    let mut assign = vec![0usize; names.len()];
    loop {
        let block_count = assign.iter().copied().max().unwrap() + 1;
        let mut blocks: Vec<BTreeSet<String>> = vec![BTreeSet::new(); block_count];
        for (i, &b) in assign.iter().enumerate() {
            blocks[b].insert(names[i].clone());
        }
        out.push(
            ClassTerm::bracket(blocks)
                .expect("partition blocks are disjoint and non-empty"),
        );

        // Advance to the next restricted growth string within the block cap.
        let mut i = names.len();
        loop {
            if i == 1 {
                // First name is always block 0; enumeration done.
                out.sort_by_key(|t| t.to_string());
                return out;
            }
            i -= 1;
            let prefix_max = assign[..i].iter().copied().max().unwrap();
            if assign[i] <= prefix_max && assign[i] + 1 < max_blocks {
                assign[i] += 1;
                for a in assign[i + 1..].iter_mut() {
                    *a = 0;
                }
                break;
            }
            assign[i] = 0;
        }
    }
}
