//! Subset reasoning over class terms.
//!
//! Two rules generate subset facts beyond what the base asserts. The
//! syntactic rule: an intersection is a subset of any intersection of fewer
//! of its names (`D&H&K` is inside `H` and inside `D&K`). The transitive
//! rule: chains of asserted and syntactic edges compose. [`SubsetClosure`]
//! answers `is_subset` for arbitrary terms by combining the syntactic rule
//! with reachability through the asserted-subset graph, which is equivalent
//! to running the naive fixpoint over every term (the test suite checks that
//! equivalence against an independent fixpoint implementation).
//!
//! Mutual subset assertions are allowed; they make two terms extensionally
//! equal. The closure records those groups rather than rejecting them.

use crate::kb::{KnowledgeBase, Sentence, Statement};
use crate::term::{ClassTerm, NameSet};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MembershipError {
    #[error("unknown individual '{0}'")]
    UnknownIndividual(String),
    #[error("individual '{individual}' has {count} asserted memberships, above the cap of {cap}")]
    TooManyMemberships { individual: String, count: usize, cap: usize },
}

/// How a subset edge is justified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeOrigin {
    Asserted,
    Syntactic,
    Transitive,
}

/// How an individual's membership in a class is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MembershipOrigin {
    /// Directly asserted name.
    Asserted,
    /// Intersection of asserted names.
    Syntactic,
    /// Superset of a held class via the subset closure.
    Closure,
}

impl MembershipOrigin {
    pub fn label(self) -> &'static str {
        match self {
            MembershipOrigin::Asserted => "asserted",
            MembershipOrigin::Syntactic => "syntactic",
            MembershipOrigin::Closure => "closure",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SubsetClosure {
    /// Every class term the base mentions anywhere, plus declared primitives.
    mentioned: BTreeSet<ClassTerm>,
    asserted: BTreeSet<(ClassTerm, ClassTerm)>,
    /// Terms that appear in subset assertions; chains route through these.
    hubs: Vec<ClassTerm>,
    /// Reflexive-transitive reachability between hubs.
    hub_reach: BTreeMap<ClassTerm, BTreeSet<ClassTerm>>,
    /// Groups of mutually-subset (extensionally equal) terms, each sorted.
    equalities: Vec<Vec<ClassTerm>>,
}

fn syntactic_subset(a: &ClassTerm, b: &ClassTerm) -> bool {
    if a.is_bracket() || b.is_bracket() {
        return false;
    }
    let an = a.names();
    b.names().iter().all(|n| an.contains(n))
}

impl SubsetClosure {
    pub fn build(kb: &KnowledgeBase) -> SubsetClosure {
        let mut mentioned: BTreeSet<ClassTerm> =
            kb.classes().iter().map(ClassTerm::prim).collect();
        for x in kb.individuals() {
            let names = kb.memberships_of(x);
            if !names.is_empty() {
                mentioned.insert(ClassTerm::intersect(names));
            }
        }
        for ((y, z), _) in kb.stats() {
            mentioned.insert(y.clone());
            mentioned.insert(z.clone());
        }
        for (_, sentence) in kb.equivs() {
            if let Sentence::Membership { class, .. } = sentence {
                mentioned.insert(class.clone());
            }
        }

        let mut asserted = BTreeSet::new();
        let mut hub_set = BTreeSet::new();
        for (sub, sup) in kb.subsets() {
            asserted.insert((sub.clone(), sup.clone()));
            hub_set.insert(sub.clone());
            hub_set.insert(sup.clone());
            mentioned.insert(sub.clone());
            mentioned.insert(sup.clone());
        }
        let hubs: Vec<ClassTerm> = hub_set.into_iter().collect();

        // Reflexive-transitive closure over hubs, where a step is an asserted
        // edge or a syntactic edge between hubs.
        let mut hub_reach: BTreeMap<ClassTerm, BTreeSet<ClassTerm>> = BTreeMap::new();
        for start in &hubs {
            let mut seen: BTreeSet<ClassTerm> = BTreeSet::new();
            let mut frontier = vec![start.clone()];
            seen.insert(start.clone());
            while let Some(cur) = frontier.pop() {
                for next in &hubs {
                    if seen.contains(next) {
                        continue;
                    }
                    let step = asserted.contains(&(cur.clone(), next.clone()))
                        || syntactic_subset(&cur, next);
                    if step {
                        seen.insert(next.clone());
                        frontier.push(next.clone());
                    }
                }
            }
            hub_reach.insert(start.clone(), seen);
        }

        let mut equalities: Vec<Vec<ClassTerm>> = Vec::new();
        let mut grouped: BTreeSet<ClassTerm> = BTreeSet::new();
        for a in &hubs {
            if grouped.contains(a) {
                continue;
            }
            let mut group = vec![a.clone()];
            for b in &hubs {
                if a != b
                    && hub_reach[a].contains(b)
                    && hub_reach[b].contains(a)
                {
                    group.push(b.clone());
                }
            }
            if group.len() > 1 {
                group.sort_by_key(|t| t.to_string());
                grouped.extend(group.iter().cloned());
                equalities.push(group);
            }
        }

        SubsetClosure { mentioned, asserted, hubs, hub_reach, equalities }
    }

    /// Builds the closure for statements alone, without validation. Handy for
    /// synthetic term lattices in tests.
    pub fn from_statements(statements: &[Statement]) -> SubsetClosure {
        let mut doc = crate::kb::KbDocument::default();
        for (i, s) in statements.iter().enumerate() {
            doc.statements.push((s.clone(), crate::kb::Span::new(i as u32 + 1, 1)));
        }
        // Closure construction only needs the subset facts; declare every
        // name so validation cannot object.
        let mut names: BTreeSet<String> = BTreeSet::new();
        for s in statements {
            match s {
                Statement::Subset { sub, sup } => {
                    names.extend(sub.names());
                    names.extend(sup.names());
                }
                Statement::Member { class, .. } => names.extend(class.names()),
                Statement::Stat { class, target, .. } => {
                    names.extend(class.names());
                    names.extend(target.names());
                }
                _ => {}
            }
        }
        let mut full = Vec::new();
        for n in names {
            full.push((Statement::ClassDecl(n), crate::kb::Span::new(0, 1)));
        }
        full.extend(doc.statements);
        let doc = crate::kb::KbDocument { statements: full };
        let kb = KnowledgeBase::from_document(&doc, Default::default())
            .expect("synthetic statements validate");
        SubsetClosure::build(&kb)
    }

    /// Is `a` a subset of `b` under asserted, syntactic, and transitive
    /// closure? Reflexive by definition.
    pub fn is_subset(&self, a: &ClassTerm, b: &ClassTerm) -> bool {
        if a == b || syntactic_subset(a, b) {
            return true;
        }
        for h1 in &self.hubs {
            if !(a == h1 || syntactic_subset(a, h1)) {
                continue;
            }
            for h2 in &self.hub_reach[h1] {
                if h2 == b || syntactic_subset(h2, b) {
                    return true;
                }
            }
        }
        false
    }

    /// Justification for a subset fact, if it holds.
    pub fn origin(&self, a: &ClassTerm, b: &ClassTerm) -> Option<EdgeOrigin> {
        if self.asserted.contains(&(a.clone(), b.clone())) {
            Some(EdgeOrigin::Asserted)
        } else if a == b || syntactic_subset(a, b) {
            Some(EdgeOrigin::Syntactic)
        } else if self.is_subset(a, b) {
            Some(EdgeOrigin::Transitive)
        } else {
            None
        }
    }

    /// Terms the base mentions; the search space for membership supersets.
    pub fn mentioned_terms(&self) -> impl Iterator<Item = &ClassTerm> {
        self.mentioned.iter()
    }

    /// Groups of extensionally equal terms created by mutual subset chains.
    pub fn equality_groups(&self) -> &[Vec<ClassTerm>] {
        &self.equalities
    }

    /// Lexicographically least member of `term`'s equality group.
    pub fn representative(&self, term: &ClassTerm) -> ClassTerm {
        for group in &self.equalities {
            if group.contains(term) {
                return group[0].clone();
            }
        }
        term.clone()
    }

    /// Every class an individual provably belongs to: asserted names, their
    /// intersections, and mentioned supersets of any of those.
    pub fn classes_of(
        &self,
        kb: &KnowledgeBase,
        individual: &str,
        membership_cap: usize,
    ) -> Result<Vec<(ClassTerm, MembershipOrigin)>, MembershipError> {
        if !kb.is_individual(individual) {
            return Err(MembershipError::UnknownIndividual(individual.to_string()));
        }
        let names = kb.memberships_of(individual);
        if names.len() > membership_cap {
            return Err(MembershipError::TooManyMemberships {
                individual: individual.to_string(),
                count: names.len(),
                cap: membership_cap,
            });
        }
        let mut held: BTreeMap<ClassTerm, MembershipOrigin> = BTreeMap::new();
        let name_vec: Vec<&String> = names.iter().collect();
        for mask in 1u32..(1 << name_vec.len()) {
            let subset: NameSet = name_vec
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, n)| (*n).clone())
                .collect();
            let origin = if subset.len() == 1 {
                MembershipOrigin::Asserted
            } else {
                MembershipOrigin::Syntactic
            };
            held.insert(ClassTerm::intersect(subset), origin);
        }
        let base: Vec<ClassTerm> = held.keys().cloned().collect();
        for candidate in &self.mentioned {
            if held.contains_key(candidate) {
                continue;
            }
            if base.iter().any(|h| self.is_subset(h, candidate)) {
                held.insert(candidate.clone(), MembershipOrigin::Closure);
            }
        }
        Ok(held.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_kb;
    use proptest::prelude::*;

    fn kb(text: &str) -> KnowledgeBase {
        parse_kb(text).unwrap()
    }

    fn prim(n: &str) -> ClassTerm {
        ClassTerm::prim(n)
    }

    #[test]
    fn chains_compose_transitively() {
        let kb = kb("class H\nclass G\nclass F\nsubset H G\nsubset G F\n");
        let closure = SubsetClosure::build(&kb);
        assert!(closure.is_subset(&prim("H"), &prim("F")));
        assert_eq!(closure.origin(&prim("H"), &prim("F")), Some(EdgeOrigin::Transitive));
        assert_eq!(closure.origin(&prim("H"), &prim("G")), Some(EdgeOrigin::Asserted));
        assert!(!closure.is_subset(&prim("F"), &prim("H")));
    }

    #[test]
    fn intersections_are_syntactic_subsets() {
        let kb = kb("class H\nclass D\nclass K\nclass V\nmember m H\nmember m D\nmember m K\nstat (and H D K) V [0, 1]\n");
        let closure = SubsetClosure::build(&kb);
        let joint = ClassTerm::intersect(["H", "D", "K"]);
        assert!(closure.is_subset(&joint, &prim("H")));
        assert_eq!(closure.origin(&joint, &prim("H")), Some(EdgeOrigin::Syntactic));
        assert!(closure.is_subset(&joint, &ClassTerm::intersect(["D", "K"])));
        assert!(!closure.is_subset(&prim("H"), &joint));
    }

    #[test]
    fn asserted_edges_bridge_intersections() {
        // D&H is inside H, H inside G, so D&H is inside G.
        let kb = kb("class H\nclass D\nclass G\nsubset H G\n");
        let closure = SubsetClosure::build(&kb);
        assert!(closure.is_subset(&ClassTerm::intersect(["D", "H"]), &prim("G")));
    }

    #[test]
    fn empty_base_is_reflexive_only() {
        let kb = kb("class H\nclass G\n");
        let closure = SubsetClosure::build(&kb);
        assert!(closure.is_subset(&prim("H"), &prim("H")));
        assert!(!closure.is_subset(&prim("H"), &prim("G")));
        assert!(closure.equality_groups().is_empty());
    }

    #[test]
    fn mutual_subsets_form_an_equality_group() {
        let kb = kb("class H\nclass G\nsubset H G\nsubset G H\n");
        let closure = SubsetClosure::build(&kb);
        assert_eq!(closure.equality_groups().len(), 1);
        assert_eq!(closure.representative(&prim("H")), prim("G"));
        assert_eq!(closure.representative(&prim("G")), prim("G"));
        assert!(closure.is_subset(&prim("H"), &prim("G")));
        assert!(closure.is_subset(&prim("G"), &prim("H")));
    }

    #[test]
    fn classes_of_enumerates_the_membership_lattice() {
        let kb = kb("class H\nclass D\nclass K\nclass V\nmember m H\nmember m D\nmember m K\nstat (and H D K) V [0, 1]\nstat H V [0.3, 0.5]\n");
        let closure = SubsetClosure::build(&kb);
        let classes = closure.classes_of(&kb, "m", 12).unwrap();
        assert_eq!(classes.len(), 7);
        let terms: Vec<String> = classes.iter().map(|(t, _)| t.to_string()).collect();
        assert_eq!(terms, ["D", "H", "K", "D&H", "D&H&K", "D&K", "H&K"]);
        let joint = classes
            .iter()
            .find(|(t, _)| t == &ClassTerm::intersect(["D", "H", "K"]))
            .unwrap();
        assert_eq!(joint.1, MembershipOrigin::Syntactic);
    }

    #[test]
    fn classes_of_follows_subset_chains() {
        let kb = kb("class H\nclass G\nmember m H\nsubset H G\n");
        let closure = SubsetClosure::build(&kb);
        let classes = closure.classes_of(&kb, "m", 12).unwrap();
        assert!(classes.contains(&(prim("G"), MembershipOrigin::Closure)));
    }

    #[test]
    fn classes_of_rejects_unknown_individuals_and_oversize_memberships() {
        let kb = kb("class H\nmember m H\n");
        let closure = SubsetClosure::build(&kb);
        assert_eq!(
            closure.classes_of(&kb, "nobody", 12).unwrap_err(),
            MembershipError::UnknownIndividual("nobody".into())
        );
        assert!(matches!(
            closure.classes_of(&kb, "m", 0).unwrap_err(),
            MembershipError::TooManyMemberships { .. }
        ));
    }

    #[test]
    fn individual_known_only_from_a_sentence_has_no_classes() {
        let kb = kb("class V\nequiv t (member m V)\n");
        let closure = SubsetClosure::build(&kb);
        let classes = closure.classes_of(&kb, "m", 12).unwrap();
        assert!(classes.is_empty());
    }

    // Independent oracle: naive iteration to fixpoint over an explicit node
    // set, used to check that the reachability-based is_subset derives
    // exactly the asserted/syntactic/transitive consequences.
    fn naive_fixpoint(
        nodes: &[ClassTerm],
        asserted: &BTreeSet<(ClassTerm, ClassTerm)>,
    ) -> BTreeSet<(ClassTerm, ClassTerm)> {
        let mut edges: BTreeSet<(ClassTerm, ClassTerm)> = BTreeSet::new();
        for a in nodes {
            for b in nodes {
                if a == b || syntactic_subset(a, b) || asserted.contains(&(a.clone(), b.clone())) {
                    edges.insert((a.clone(), b.clone()));
                }
            }
        }
        loop {
            let mut grew = false;
            let snapshot: Vec<(ClassTerm, ClassTerm)> = edges.iter().cloned().collect();
            for (a, b) in &snapshot {
                for (c, d) in &snapshot {
                    if b == c && edges.insert((a.clone(), d.clone())) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return edges;
            }
        }
    }

    fn all_terms_over(names: &[&str]) -> Vec<ClassTerm> {
        let mut terms = Vec::new();
        for mask in 1u32..(1 << names.len()) {
            let subset: Vec<&str> = names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, n)| *n)
                .collect();
            terms.push(ClassTerm::intersect(subset));
        }
        terms
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_the_naive_fixpoint(pairs in prop::collection::vec((0usize..15, 0usize..15), 0..6)) {
            let names = ["A", "B", "C", "D"];
            let nodes = all_terms_over(&names);
            let mut asserted = BTreeSet::new();
            let mut statements = Vec::new();
            for (i, j) in pairs {
                let (sub, sup) = (nodes[i].clone(), nodes[j].clone());
                asserted.insert((sub.clone(), sup.clone()));
                statements.push(Statement::Subset { sub, sup });
            }
            let closure = SubsetClosure::from_statements(&statements);
            let oracle = naive_fixpoint(&nodes, &asserted);
            for a in &nodes {
                for b in &nodes {
                    let want = oracle.contains(&(a.clone(), b.clone()));
                    prop_assert_eq!(
                        closure.is_subset(a, b),
                        want,
                        "{} subset of {} should be {}", a, b, want
                    );
                }
            }
        }

        // Adding an assertion never removes derivable subset facts.
        #[test]
        fn closure_grows_monotonically(pairs in prop::collection::vec((0usize..7, 0usize..7), 1..5)) {
            let names = ["A", "B", "C"];
            let nodes = all_terms_over(&names);
            let statements: Vec<Statement> = pairs
                .iter()
                .map(|(i, j)| Statement::Subset { sub: nodes[*i].clone(), sup: nodes[*j].clone() })
                .collect();
            let smaller = SubsetClosure::from_statements(&statements[..statements.len() - 1]);
            let larger = SubsetClosure::from_statements(&statements);
            for a in &nodes {
                for b in &nodes {
                    if smaller.is_subset(a, b) {
                        prop_assert!(larger.is_subset(a, b));
                    }
                }
            }
        }
    }
}
