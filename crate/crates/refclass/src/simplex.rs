//! Two-phase simplex over exact rationals.
//!
//! Small and dense on purpose: the systems it sees have at most a few dozen
//! variables (one per atom of a name algebra) and a handful of constraints.
//! All arithmetic is rational, and pivoting uses Bland's rule, so the method
//! terminates and the optima are exact. Variables are implicitly
//! non-negative, which matches weights and the substitution variable used by
//! the fractional objective upstairs.

use crate::rational::{zero, Rational};
use num::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub(crate) struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug)]
pub(crate) struct Lp {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// m rows by (cols + 1); the final column is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row, same width as `rows` entries.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
    banned: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &pivot;
        }
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..=self.cols {
                let delta = &self.rows[row][c] * &factor;
                self.rows[r][c] -= delta;
            }
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for c in 0..=self.cols {
                let delta = &self.rows[row][c] * &factor;
                self.cost[c] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex to optimality on the current cost row (a maximization
    /// written as minimizing the negated reduced costs). Returns false on
    /// unboundedness.
    fn optimize(&mut self) -> bool {
        loop {
            // Bland's rule: smallest improvable column index.
            let entering = (0..self.cols)
                .find(|&j| !self.banned[j] && self.cost[j] < zero());
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col] > zero() {
                    let ratio = &self.rows[r][self.cols] / &self.rows[r][col];
                    let better = match &leaving {
                        None => true,
                        Some((best_row, best)) => {
                            ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_row])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Maximizes (or minimizes) `objective` over the constraint set with all
/// variables non-negative.
pub(crate) fn solve(lp: &Lp, objective: &[Rational], maximize: bool) -> LpOutcome {
    assert_eq!(objective.len(), lp.num_vars);

    // Normalize: non-negative right-hand sides, slack and surplus columns,
    // artificials for rows without an obvious basic column.
    let n = lp.num_vars;
    let mut normalized: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        assert_eq!(c.coeffs.len(), n);
        let mut coeffs = c.coeffs.clone();
        let mut relation = c.relation;
        let mut rhs = c.rhs.clone();
        if rhs < zero() {
            for v in coeffs.iter_mut() {
                *v = -v.clone();
            }
            rhs = -rhs;
            relation = match relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        normalized.push((coeffs, relation, rhs));
    }

    let m = normalized.len();
    let slack_count = normalized
        .iter()
        .filter(|(_, rel, _)| !matches!(rel, Relation::Eq))
        .count();
    let artificial_count = normalized
        .iter()
        .filter(|(_, rel, _)| !matches!(rel, Relation::Le))
        .count();
    let cols = n + slack_count + artificial_count;

    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis = vec![0usize; m];
    let mut next_slack = n;
    let mut next_artificial = n + slack_count;
    let mut artificials = Vec::new();
    for (r, (coeffs, relation, rhs)) in normalized.iter().enumerate() {
        let mut row = vec![zero(); cols + 1];
        row[..n].clone_from_slice(coeffs);
        row[cols] = rhs.clone();
        match relation {
            Relation::Le => {
                row[next_slack] = Rational::from_integer(1.into());
                basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = Rational::from_integer((-1).into());
                next_slack += 1;
                row[next_artificial] = Rational::from_integer(1.into());
                basis[r] = next_artificial;
                artificials.push(next_artificial);
                next_artificial += 1;
            }
            Relation::Eq => {
                row[next_artificial] = Rational::from_integer(1.into());
                basis[r] = next_artificial;
                artificials.push(next_artificial);
                next_artificial += 1;
            }
        }
        rows.push(row);
    }

    let mut tableau = Tableau {
        rows,
        cost: vec![zero(); cols + 1],
        basis,
        cols,
        banned: vec![false; cols],
    };

    if !artificials.is_empty() {
        // Phase one: minimize the artificial total.
        for &a in &artificials {
            tableau.cost[a] = Rational::from_integer(1.into());
        }
        for r in 0..m {
            if artificials.contains(&tableau.basis[r]) {
                let factor = tableau.cost[tableau.basis[r]].clone();
                for c in 0..=cols {
                    let delta = &tableau.rows[r][c] * &factor;
                    tableau.cost[c] -= delta;
                }
            }
        }
        let bounded = tableau.optimize();
        assert!(bounded, "phase one is bounded below by zero");
        if tableau.cost[cols] != zero() {
            return LpOutcome::Infeasible;
        }
        // Pivot leftover artificials out of the basis; a row that offers no
        // pivot is redundant and can stay, its artificial frozen at zero.
        for r in 0..m {
            if artificials.contains(&tableau.basis[r]) {
                if let Some(col) =
                    (0..n + slack_count).find(|&c| !tableau.rows[r][c].is_zero())
                {
                    tableau.pivot(r, col);
                }
            }
        }
        for &a in &artificials {
            tableau.banned[a] = true;
        }
    }

    // Phase two: the real objective, negated into reduced costs.
    tableau.cost = vec![zero(); cols + 1];
    for j in 0..n {
        tableau.cost[j] = if maximize {
            -objective[j].clone()
        } else {
            objective[j].clone()
        };
    }
    for r in 0..m {
        let b = tableau.basis[r];
        let factor = tableau.cost[b].clone();
        if !factor.is_zero() {
            for c in 0..=cols {
                let delta = &tableau.rows[r][c] * &factor;
                tableau.cost[c] -= delta;
            }
        }
    }
    if !tableau.optimize() {
        return LpOutcome::Unbounded;
    }

    let mut point = vec![zero(); n];
    for r in 0..m {
        if tableau.basis[r] < n {
            point[tableau.basis[r]] = tableau.rows[r][cols].clone();
        }
    }
    let mut value = zero();
    for j in 0..n {
        value += &objective[j] * &point[j];
    }
    LpOutcome::Optimal { value, point }
}

pub(crate) fn feasible(lp: &Lp) -> bool {
    let objective = vec![zero(); lp.num_vars];
    !matches!(solve(lp, &objective, true), LpOutcome::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    fn le(coeffs: &[(i64, i64)], rhs: (i64, i64)) -> Constraint {
        Constraint {
            coeffs: coeffs.iter().map(|&(n, d)| r(n, d)).collect(),
            relation: Relation::Le,
            rhs: r(rhs.0, rhs.1),
        }
    }

    fn eq(coeffs: &[(i64, i64)], rhs: (i64, i64)) -> Constraint {
        Constraint {
            coeffs: coeffs.iter().map(|&(n, d)| r(n, d)).collect(),
            relation: Relation::Eq,
            rhs: r(rhs.0, rhs.1),
        }
    }

    #[test]
    fn maximizes_over_a_simplex() {
        let lp = Lp {
            num_vars: 2,
            constraints: vec![le(&[(1, 1), (1, 1)], (1, 1))],
        };
        let out = solve(&lp, &[r(2, 1), r(1, 1)], true);
        assert_eq!(
            out,
            LpOutcome::Optimal { value: r(2, 1), point: vec![r(1, 1), r(0, 1)] }
        );
    }

    #[test]
    fn fractional_vertices_are_exact() {
        let lp = Lp {
            num_vars: 2,
            constraints: vec![le(&[(3, 1), (2, 1)], (6, 1)), le(&[(1, 1), (2, 1)], (4, 1))],
        };
        match solve(&lp, &[r(2, 1), r(3, 1)], true) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, r(13, 2));
                assert_eq!(point, vec![r(1, 1), r(3, 2)]);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn equality_constraints_work() {
        let lp = Lp {
            num_vars: 2,
            constraints: vec![eq(&[(1, 1), (1, 1)], (1, 1))],
        };
        match solve(&lp, &[r(1, 1), r(0, 1)], false) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(0, 1)),
            other => panic!("expected optimum, got {other:?}"),
        }
        match solve(&lp, &[r(1, 1), r(0, 1)], true) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(1, 1)),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn detects_infeasibility() {
        // x + y <= 1 and x + y >= 2 cannot both hold.
        let lp = Lp {
            num_vars: 2,
            constraints: vec![
                le(&[(1, 1), (1, 1)], (1, 1)),
                Constraint {
                    coeffs: vec![r(1, 1), r(1, 1)],
                    relation: Relation::Ge,
                    rhs: r(2, 1),
                },
            ],
        };
        assert_eq!(solve(&lp, &[r(1, 1), r(0, 1)], true), LpOutcome::Infeasible);
        assert!(!feasible(&lp));
    }

    #[test]
    fn detects_unboundedness() {
        let lp = Lp { num_vars: 1, constraints: vec![] };
        assert_eq!(solve(&lp, &[r(1, 1)], true), LpOutcome::Unbounded);
        // Bounded below at zero by non-negativity.
        match solve(&lp, &[r(1, 1)], false) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(0, 1)),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // -x <= -1/2 is x >= 1/2.
        let lp = Lp {
            num_vars: 1,
            constraints: vec![le(&[(-1, 1)], (-1, 2)), le(&[(1, 1)], (1, 1))],
        };
        match solve(&lp, &[r(1, 1)], false) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(1, 2)),
            other => panic!("expected optimum, got {other:?}"),
        }
    }
}
