//! Class terms: the names reference classes go by.
//!
//! Three forms cover everything the engine reasons about. A *primitive* is a
//! declared class name. An *intersection* is a flat, sorted set of primitive
//! names, so `H & D` and `D & H` are the same term. A *bracket* groups
//! pairwise-disjoint sets of primitive names into constituents; brackets name
//! the agreement-conditioned combination classes built by the construction
//! layer and never appear in source knowledge bases. Canonical form is
//! maintained by the constructors: sorted, deduplicated, and with one-element
//! collections collapsed to the simpler form.

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

pub type NameSet = BTreeSet<String>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("intersection with no names")]
    EmptyIntersection,
    #[error("bracket with no constituents")]
    EmptyBracket,
    #[error("bracket constituent with no names")]
    EmptyConstituent,
    #[error("bracket constituents overlap on '{name}'")]
    OverlappingConstituents { name: String },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ClassTerm {
    Prim(String),
    /// At least two names; one-element intersections collapse to `Prim`.
    Intersect(NameSet),
    /// At least two constituents; a one-constituent bracket collapses to the
    /// intersection (or primitive) of its names.
    Bracket(BTreeSet<NameSet>),
}

impl ClassTerm {
    pub fn prim(name: impl Into<String>) -> ClassTerm {
        ClassTerm::Prim(name.into())
    }

    /// Canonical intersection of the given names. Panics on an empty list;
    /// the grammar and every internal caller supply at least one name.
    pub fn intersect<I, S>(names: I) -> ClassTerm
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: NameSet = names.into_iter().map(Into::into).collect();
        match set.len() {
            0 => panic!("intersection of no names"),
            1 => ClassTerm::Prim(set.into_iter().next().unwrap()),
            _ => ClassTerm::Intersect(set),
        }
    }

    /// Canonical bracket over the given constituents. Rejects overlap between
    /// constituents; collapses a single constituent to its intersection.
    pub fn bracket<I, C, S>(constituents: I) -> Result<ClassTerm, TermError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut sets: BTreeSet<NameSet> = BTreeSet::new();
        for c in constituents {
            let set: NameSet = c.into_iter().map(Into::into).collect();
            if set.is_empty() {
                return Err(TermError::EmptyConstituent);
            }
            sets.insert(set);
        }
        if sets.is_empty() {
            return Err(TermError::EmptyBracket);
        }
        let mut seen: NameSet = NameSet::new();
        for set in &sets {
            for name in set {
                if !seen.insert(name.clone()) {
                    return Err(TermError::OverlappingConstituents { name: name.clone() });
                }
            }
        }
        if sets.len() == 1 {
            return Ok(ClassTerm::intersect(sets.into_iter().next().unwrap()));
        }
        Ok(ClassTerm::Bracket(sets))
    }

    /// Re-normalizes an arbitrarily built term. The constructors already
    /// produce canonical terms; this is for values assembled by hand.
    pub fn canonicalize(self) -> Result<ClassTerm, TermError> {
        match self {
            ClassTerm::Prim(p) => Ok(ClassTerm::Prim(p)),
            ClassTerm::Intersect(s) if s.is_empty() => Err(TermError::EmptyIntersection),
            ClassTerm::Intersect(s) => Ok(ClassTerm::intersect(s)),
            ClassTerm::Bracket(cs) => ClassTerm::bracket(cs),
        }
    }

    /// Every primitive name the term mentions.
    pub fn names(&self) -> NameSet {
        match self {
            ClassTerm::Prim(p) => std::iter::once(p.clone()).collect(),
            ClassTerm::Intersect(s) => s.clone(),
            ClassTerm::Bracket(cs) => cs.iter().flatten().cloned().collect(),
        }
    }

    /// The constituent view used by the bracket reflection rule: a primitive
    /// or intersection counts as a one-constituent bracket of its names.
    pub fn constituents(&self) -> BTreeSet<NameSet> {
        match self {
            ClassTerm::Prim(p) => {
                let mut set = BTreeSet::new();
                set.insert(std::iter::once(p.clone()).collect());
                set
            }
            ClassTerm::Intersect(s) => {
                let mut set = BTreeSet::new();
                set.insert(s.clone());
                set
            }
            ClassTerm::Bracket(cs) => cs.clone(),
        }
    }

    pub fn is_intersection(&self) -> bool {
        matches!(self, ClassTerm::Intersect(_))
    }

    pub fn is_bracket(&self) -> bool {
        matches!(self, ClassTerm::Bracket(_))
    }
}

impl fmt::Display for ClassTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(names: &NameSet) -> String {
            names.iter().cloned().collect::<Vec<_>>().join("&")
        }
        match self {
            ClassTerm::Prim(p) => f.write_str(p),
            ClassTerm::Intersect(s) => f.write_str(&join(s)),
            ClassTerm::Bracket(cs) => {
                let parts: Vec<String> = cs.iter().map(join).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}
