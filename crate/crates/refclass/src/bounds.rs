//! Conditional-frequency bounds over a small name algebra.
//!
//! An [`AtomSystem`] treats every conjunction of a handful of class names as
//! an event over atoms (the complete Boolean assignments to those names) and
//! turns each known frequency statement into a pair of linear constraints on
//! the atom weights. [`AtomSystem::bound_conditional`] then computes the
//! tightest interval the weights allow for a conditional frequency, which is
//! how statistics for intersection classes that nobody asserted directly are
//! derived.
//!
//! The optimum of a ratio of linear forms over a polytope is found by the
//! usual substitution trick: scale the weights so the denominator becomes 1
//! and carry the scale factor as an extra variable. Every admissible
//! weighting with positive denominator corresponds to exactly one point of
//! the transformed program, so its optima are the exact bounds.

use std::fmt;

use num::{BigInt, Integer, One, Zero};

use crate::interval::Interval;
use crate::rational::{zero, Rational};
use crate::simplex::{self, Constraint, Lp, LpOutcome, Relation};
use crate::term::ClassTerm;

/// Largest name set an [`AtomSystem`] accepts; the atom count is `2^names`.
pub const NAME_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("weight systems support at most {cap} names, got {count}")]
    TooManyNames { count: usize, cap: usize },
    #[error("name `{0}` is not part of this weight system")]
    UnknownName(String),
    #[error("class `{0}` cannot be expressed over atoms")]
    UnsupportedClass(ClassTerm),
    #[error("no weighting satisfies the statistics: {}", .constraints.join("; "))]
    Inconsistent { constraints: Vec<String> },
}

struct Row {
    label: String,
    /// One coefficient per atom; the row asserts `coeffs . w <= 0`.
    coeffs: Vec<Rational>,
}

/// A weight polytope over the atoms of a fixed, small set of class names.
pub struct AtomSystem {
    names: Vec<String>,
    rows: Vec<Row>,
}

impl AtomSystem {
    pub fn new(names: impl IntoIterator<Item = String>) -> Result<AtomSystem, BoundsError> {
        let mut names: Vec<String> = names.into_iter().collect();
        names.sort();
        names.dedup();
        if names.len() > NAME_CAP {
            return Err(BoundsError::TooManyNames { count: names.len(), cap: NAME_CAP });
        }
        Ok(AtomSystem { names, rows: Vec::new() })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The recorded statistics, one label per `add_stat` call.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for row in &self.rows {
            if out.last() != Some(&row.label) {
                out.push(row.label.clone());
            }
        }
        out
    }

    fn atom_count(&self) -> usize {
        1 << self.names.len()
    }

    fn term_mask(&self, term: &ClassTerm) -> Result<usize, BoundsError> {
        if term.is_bracket() {
            return Err(BoundsError::UnsupportedClass(term.clone()));
        }
        let mut mask = 0usize;
        for name in term.names() {
            let bit = self
                .names
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| BoundsError::UnknownName(name.clone()))?;
            mask |= 1 << bit;
        }
        Ok(mask)
    }

    /// Records `interval` as the frequency of `target` within `class`,
    /// adding the two linear constraints it imposes on atom weights.
    pub fn add_stat(
        &mut self,
        class: &ClassTerm,
        target: &ClassTerm,
        interval: &Interval,
    ) -> Result<(), BoundsError> {
        let class_mask = self.term_mask(class)?;
        let both_mask = class_mask | self.term_mask(target)?;
        let atoms = self.atom_count();
        let label = format!("stat {class} {target} = {interval}");

        // lo * w(class) <= w(class & target) <= hi * w(class)
        let mut lower = vec![zero(); atoms];
        let mut upper = vec![zero(); atoms];
        for atom in 0..atoms {
            let in_class = atom & class_mask == class_mask;
            let in_both = atom & both_mask == both_mask;
            if in_class {
                lower[atom] += interval.lo();
                upper[atom] -= interval.hi();
            }
            if in_both {
                lower[atom] -= Rational::one();
                upper[atom] += Rational::one();
            }
        }
        self.rows.push(Row { label: label.clone(), coeffs: lower });
        self.rows.push(Row { label, coeffs: upper });
        Ok(())
    }

    fn stat_constraints(&self, num_vars: usize) -> Vec<Constraint> {
        self.rows
            .iter()
            .map(|row| {
                let mut coeffs = row.coeffs.clone();
                coeffs.resize(num_vars, zero());
                Constraint { coeffs, relation: Relation::Le, rhs: zero() }
            })
            .collect()
    }

    fn check_consistent(&self) -> Result<(), BoundsError> {
        let atoms = self.atom_count();
        let mut constraints = self.stat_constraints(atoms);
        constraints.push(Constraint {
            coeffs: vec![Rational::one(); atoms],
            relation: Relation::Eq,
            rhs: Rational::one(),
        });
        if simplex::feasible(&Lp { num_vars: atoms, constraints }) {
            Ok(())
        } else {
            Err(BoundsError::Inconsistent {
                constraints: self.rows.iter().map(|r| r.label.clone()).collect(),
            })
        }
    }

    /// Tightest interval for the frequency of `target` within `class` over
    /// all weightings compatible with the recorded statistics.
    ///
    /// When every compatible weighting gives `class` weight zero the
    /// conditional frequency is unconstrained and the result is `[0, 1]`.
    /// An empty polytope is reported as [`BoundsError::Inconsistent`].
    pub fn bound_conditional(
        &self,
        class: &ClassTerm,
        target: &ClassTerm,
    ) -> Result<Interval, BoundsError> {
        let class_mask = self.term_mask(class)?;
        let both_mask = class_mask | self.term_mask(target)?;
        self.check_consistent()?;

        // Variables: one scaled weight per atom, then the scale factor t.
        let atoms = self.atom_count();
        let num_vars = atoms + 1;
        let mut constraints = self.stat_constraints(num_vars);
        let mut total = vec![Rational::one(); atoms];
        total.push(-Rational::one());
        constraints.push(Constraint { coeffs: total, relation: Relation::Eq, rhs: zero() });
        let mut denom = vec![zero(); num_vars];
        for atom in 0..atoms {
            if atom & class_mask == class_mask {
                denom[atom] = Rational::one();
            }
        }
        constraints.push(Constraint { coeffs: denom, relation: Relation::Eq, rhs: Rational::one() });

        let mut objective = vec![zero(); num_vars];
        for atom in 0..atoms {
            if atom & both_mask == both_mask {
                objective[atom] = Rational::one();
            }
        }

        let lp = Lp { num_vars, constraints };
        let lo = match simplex::solve(&lp, &objective, false) {
            LpOutcome::Optimal { value, .. } => value,
            LpOutcome::Infeasible => return Ok(Interval::vacuous()),
            LpOutcome::Unbounded => unreachable!("conditional frequency lies in [0, 1]"),
        };
        let hi = match simplex::solve(&lp, &objective, true) {
            LpOutcome::Optimal { value, .. } => value,
            LpOutcome::Infeasible | LpOutcome::Unbounded => {
                unreachable!("bounded above by 1 on a nonempty polytope")
            }
        };
        Ok(Interval::new(lo, hi).expect("optima of a shared polytope are ordered"))
    }

    /// Exhaustively scans weightings whose atom weights are multiples of
    /// `1/resolution` and returns the extreme conditional frequencies seen,
    /// or `None` when no scanned weighting gives `class` positive weight.
    ///
    /// This is a slow cross-check for [`AtomSystem::bound_conditional`]:
    /// every scanned weighting lies in the polytope, so the scanned range is
    /// always contained in the computed one and approaches it as the
    /// resolution grows.
    pub fn scan_conditional(
        &self,
        class: &ClassTerm,
        target: &ClassTerm,
        resolution: u32,
    ) -> Result<Option<(Rational, Rational)>, BoundsError> {
        assert!(resolution > 0, "resolution must be positive");
        let class_mask = self.term_mask(class)?;
        let both_mask = class_mask | self.term_mask(target)?;
        let atoms = self.atom_count();

        // Integer form of each row: clearing denominators preserves the
        // inequality, so feasibility checks stay exact in integers.
        let int_rows: Vec<Vec<BigInt>> = self
            .rows
            .iter()
            .map(|row| {
                let mut common = BigInt::one();
                for c in &row.coeffs {
                    common = common.lcm(c.denom());
                }
                let scale = Rational::from_integer(common);
                row.coeffs.iter().map(|c| (c * &scale).to_integer()).collect()
            })
            .collect();
        let suffix_min: Vec<Vec<BigInt>> = int_rows
            .iter()
            .map(|coeffs| {
                let mut mins = coeffs.clone();
                for i in (0..atoms.saturating_sub(1)).rev() {
                    if mins[i + 1] < mins[i] {
                        mins[i] = mins[i + 1].clone();
                    }
                }
                mins
            })
            .collect();

        let mut search = GridSearch {
            int_rows: &int_rows,
            suffix_min: &suffix_min,
            class_mask,
            both_mask,
            atoms,
            range: None,
        };
        let mut partials = vec![BigInt::zero(); int_rows.len()];
        search.run(0, resolution, &mut partials, 0, 0);
        Ok(search.range)
    }
}

struct GridSearch<'a> {
    int_rows: &'a [Vec<BigInt>],
    suffix_min: &'a [Vec<BigInt>],
    class_mask: usize,
    both_mask: usize,
    atoms: usize,
    range: Option<(Rational, Rational)>,
}

impl GridSearch<'_> {
    fn record(&mut self, class_total: u32, both_total: u32) {
        if class_total == 0 {
            return;
        }
        let ratio = Rational::new(BigInt::from(both_total), BigInt::from(class_total));
        match &mut self.range {
            None => self.range = Some((ratio.clone(), ratio)),
            Some((lo, hi)) => {
                if ratio < *lo {
                    *lo = ratio;
                } else if ratio > *hi {
                    *hi = ratio;
                }
            }
        }
    }

    fn run(
        &mut self,
        atom: usize,
        remaining: u32,
        partials: &mut [BigInt],
        class_total: u32,
        both_total: u32,
    ) {
        let big_remaining = BigInt::from(remaining);
        for (row, partial) in partials.iter().enumerate() {
            if partial + &self.suffix_min[row][atom] * &big_remaining > BigInt::zero() {
                return;
            }
        }
        let in_class = atom & self.class_mask == self.class_mask;
        let in_both = atom & self.both_mask == self.both_mask;
        if atom == self.atoms - 1 {
            for (row, partial) in partials.iter().enumerate() {
                if partial + &self.int_rows[row][atom] * &big_remaining > BigInt::zero() {
                    return;
                }
            }
            self.record(
                class_total + if in_class { remaining } else { 0 },
                both_total + if in_both { remaining } else { 0 },
            );
            return;
        }
        for count in 0..=remaining {
            if count > 0 {
                for (row, partial) in partials.iter_mut().enumerate() {
                    *partial += &self.int_rows[row][atom];
                }
            }
            self.run(
                atom + 1,
                remaining - count,
                partials,
                class_total + if in_class { count } else { 0 },
                both_total + if in_both { count } else { 0 },
            );
        }
        for (row, partial) in partials.iter_mut().enumerate() {
            *partial -= &self.int_rows[row][atom] * BigInt::from(remaining);
        }
    }
}

impl fmt::Debug for AtomSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AtomSystem")
            .field("names", &self.names)
            .field("rows", &self.rows.iter().map(|r| &r.label).collect::<Vec<_>>())
            .finish()
    }
}
