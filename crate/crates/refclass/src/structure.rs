//! Inference structures and the relations that decide between them.
//!
//! An [`InferenceStructure`] ties a subject to a target class through a
//! reference class carrying an interval statistic. Selection works on three
//! relations defined here: reflection (one structure's class accounts for
//! another's), domination (one-way reflection), and a deterministic strength
//! order used to linearize the candidate queue.

use std::collections::BTreeMap;
use std::fmt;

use crate::closure::SubsetClosure;
use crate::construct::bracket_reflects;
use crate::interval::Interval;
use crate::term::ClassTerm;

/// A reference class: an ordinary class term, or the cartesian product of
/// several class terms (the pair-class a product construction quantifies
/// over).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RefClass {
    Term(ClassTerm),
    Product(Vec<ClassTerm>),
}

impl RefClass {
    pub fn term(&self) -> Option<&ClassTerm> {
        match self {
            RefClass::Term(t) => Some(t),
            RefClass::Product(_) => None,
        }
    }
}

impl From<ClassTerm> for RefClass {
    fn from(term: ClassTerm) -> RefClass {
        RefClass::Term(term)
    }
}

impl fmt::Display for RefClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefClass::Term(t) => write!(f, "{t}"),
            RefClass::Product(factors) => {
                for (i, factor) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "×")?;
                    }
                    if factor.is_intersection() {
                        write!(f, "({factor})")?;
                    } else {
                        write!(f, "{factor}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Where a structure's interval came from. Derived variants record the
/// factor statistics they were computed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Stated in the knowledge base (possibly collapsed from a nested chain).
    Asserted,
    /// Product construction: endpoint products of the factor intervals.
    Product { factors: Vec<(ClassTerm, Interval)> },
    /// Agreement construction: odds-product combination of the factor
    /// intervals, conditioned on the factors agreeing.
    Agreement { factors: Vec<(ClassTerm, Interval)> },
    /// Linear bounds derived from the statistics named here.
    Bounds { stats: Vec<String> },
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::Asserted => "asserted",
            Provenance::Product { .. } => "product",
            Provenance::Agreement { .. } => "agreement",
            Provenance::Bounds { .. } => "bounds",
        }
    }

    fn factor_classes(&self) -> Option<Vec<&ClassTerm>> {
        match self {
            Provenance::Product { factors } | Provenance::Agreement { factors } => {
                Some(factors.iter().map(|(t, _)| t).collect())
            }
            _ => None,
        }
    }
}

/// A subject, a reference class, a target, and the interval the reference
/// class assigns to the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceStructure {
    pub subject: String,
    pub ref_class: RefClass,
    pub target: ClassTerm,
    pub interval: Interval,
    pub provenance: Provenance,
}

impl fmt::Display for InferenceStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<{}, {}, {}, {}>",
            self.subject, self.ref_class, self.target, self.interval
        )
    }
}

/// Why one structure reflects another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReflectionRule {
    /// The reflecting class is a subset of the reflected class.
    Subset,
    /// Constituent containment between bracket forms.
    Bracket,
    /// An agreement-construction structure over the same factors as a
    /// product-construction structure.
    Construction,
}

impl ReflectionRule {
    pub fn label(&self) -> &'static str {
        match self {
            ReflectionRule::Subset => "subset",
            ReflectionRule::Bracket => "bracket",
            ReflectionRule::Construction => "construction",
        }
    }
}

fn sorted_factors(factors: Vec<&ClassTerm>) -> Vec<&ClassTerm> {
    let mut factors = factors;
    factors.sort();
    factors
}

/// Returns the rule by which `a` reflects `b`, if any. Reflection is only
/// defined between structures for the same subject and target.
pub fn reflects(
    a: &InferenceStructure,
    b: &InferenceStructure,
    closure: &SubsetClosure,
) -> Option<ReflectionRule> {
    if a.subject != b.subject || a.target != b.target {
        return None;
    }
    if let (RefClass::Term(ta), RefClass::Term(tb)) = (&a.ref_class, &b.ref_class) {
        if !ta.is_bracket() && !tb.is_bracket() && closure.is_subset(ta, tb) {
            return Some(ReflectionRule::Subset);
        }
        if bracket_reflects(ta, tb) {
            return Some(ReflectionRule::Bracket);
        }
    }
    if let (Provenance::Agreement { .. }, Provenance::Product { .. }) =
        (&a.provenance, &b.provenance)
    {
        let fa = sorted_factors(a.provenance.factor_classes().unwrap());
        let fb = sorted_factors(b.provenance.factor_classes().unwrap());
        if fa == fb {
            return Some(ReflectionRule::Construction);
        }
    }
    None
}

/// One-way reflection: `a` accounts for `b` but not the other way around.
pub fn dominates(
    a: &InferenceStructure,
    b: &InferenceStructure,
    closure: &SubsetClosure,
) -> bool {
    reflects(a, b, closure).is_some() && reflects(b, a, closure).is_none()
}

/// Orders candidates from strongest to weakest: narrower intervals first,
/// then higher lower endpoints. Candidates with identical intervals are
/// ranked by how many of their interval-mates they dominate (classes that
/// account for their peers come first), then by rendering.
pub fn order_by_strength(structures: &mut [InferenceStructure], closure: &SubsetClosure) {
    structures.sort_by(|a, b| {
        a.interval
            .width()
            .cmp(&b.interval.width())
            .then_with(|| b.interval.lo().cmp(a.interval.lo()))
            .then_with(|| a.ref_class.to_string().cmp(&b.ref_class.to_string()))
    });
    let mut groups: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (i, s) in structures.iter().enumerate() {
        let key = (s.interval.lo().to_string(), s.interval.hi().to_string());
        groups.entry(key).or_default().push(i);
    }
    for indices in groups.values() {
        if indices.len() < 2 {
            continue;
        }
        let mut ranked: Vec<(usize, InferenceStructure)> =
            indices.iter().map(|&i| (i, structures[i].clone())).collect();
        ranked.sort_by(|(_, a), (_, b)| {
            let count = |s: &InferenceStructure| {
                indices
                    .iter()
                    .filter(|&&j| dominates(s, &structures[j], closure))
                    .count()
            };
            count(b)
                .cmp(&count(a))
                .then_with(|| a.ref_class.to_string().cmp(&b.ref_class.to_string()))
        });
        for (&slot, (_, s)) in indices.iter().zip(ranked) {
            structures[slot] = s;
        }
    }
}
