//! Query evaluation: resolve the target sentence, collect candidate
//! inference structures, and run the selection loop.
//!
//! Selection follows a priority queue ordered by strength. The strongest
//! remaining candidate is scanned against every candidate whose interval
//! disagrees with it: a disagreeing candidate it reflects one-way is deleted
//! from the queue (it can never win, since anything that beats it would have
//! to reflect the scanner back), while a disagreeing candidate it fails to
//! dominate fails the scanner itself, and the loop moves on to the next
//! strongest. The survivor of a clean scan is the answer; an exhausted queue
//! falls back to the vacuous interval.

use std::collections::{BTreeMap, BTreeSet};

use crate::bounds::{AtomSystem, BoundsError, NAME_CAP};
use crate::closure::{MembershipError, SubsetClosure};
use crate::construct::{enumerate_brackets, isx_stat, isxb_stat};
use crate::interval::Interval;
use crate::kb::{KnowledgeBase, Sentence, StatIndex};
use crate::structure::{order_by_strength, reflects, InferenceStructure, Provenance, RefClass};
use crate::term::{ClassTerm, NameSet};
use crate::trace::{Trace, TraceCandidate, TraceIteration, TraceReflection};

/// Knobs for a single query evaluation.
#[derive(Clone, Debug)]
pub struct QueryConfig {
    /// Generate agreement-combination candidates over bracket classes.
    pub constructions: bool,
    /// Generate product-class candidates alongside the agreement ones.
    pub products: bool,
    /// Derive statistics for intersection classes that lack asserted ones.
    pub bounds: bool,
    /// Partition size limit for bracket enumeration. Values above 2 are
    /// honored only for subjects with at most 8 membership names.
    pub max_bracket_blocks: usize,
    /// Most asserted memberships a queried subject may have.
    pub membership_cap: usize,
}

impl Default for QueryConfig {
    fn default() -> QueryConfig {
        QueryConfig {
            constructions: true,
            products: true,
            bounds: false,
            max_bracket_blocks: 2,
            membership_cap: 12,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("sentence `{0}` does not resolve to any membership sentence")]
    Unresolvable(String),
    #[error(transparent)]
    Membership(#[from] MembershipError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// All membership sentences reachable from `sentence` by chaining asserted
/// equivalences in either direction.
pub fn target_memberships(
    kb: &KnowledgeBase,
    sentence: &Sentence,
) -> Result<Vec<(String, ClassTerm)>, QueryError> {
    let mut seen: BTreeSet<Sentence> = BTreeSet::new();
    let mut queue = vec![sentence.clone()];
    let mut found: Vec<(String, ClassTerm)> = Vec::new();
    while let Some(current) = queue.pop() {
        if !seen.insert(current.clone()) {
            continue;
        }
        if let Sentence::Membership { individual, class } = &current {
            found.push((individual.clone(), class.clone()));
        }
        for (name, other) in kb.equivs() {
            let named = Sentence::Name(name.clone());
            if *other == current {
                queue.push(named);
            } else if named == current {
                queue.push(other.clone());
            }
        }
    }
    found.sort();
    found.dedup();
    if found.is_empty() {
        return Err(QueryError::Unresolvable(sentence.to_string()));
    }
    Ok(found)
}

fn term_of(names: &NameSet) -> ClassTerm {
    ClassTerm::intersect(names.iter().cloned())
}

/// Derived statistics shared across the subjects of one query: interval plus
/// the labels of the statistics it was computed from.
type DerivedStats = BTreeMap<(ClassTerm, ClassTerm), (Interval, Vec<String>)>;

struct Collector<'a> {
    kb: &'a KnowledgeBase,
    closure: &'a SubsetClosure,
    config: &'a QueryConfig,
    asserted: StatIndex,
    derived: DerivedStats,
    warnings: Vec<String>,
}

impl Collector<'_> {
    fn lookup(&self, class: &ClassTerm, target: &ClassTerm) -> Option<Interval> {
        if let Some(interval) = self.asserted.get(class, target) {
            return Some(interval.clone());
        }
        self.derived.get(&(class.clone(), target.clone())).map(|(i, _)| i.clone())
    }

    fn derive_bounds(
        &mut self,
        class: &ClassTerm,
        target: &ClassTerm,
    ) -> Result<Option<(Interval, Vec<String>)>, QueryError> {
        let key = (class.clone(), target.clone());
        if let Some(entry) = self.derived.get(&key) {
            return Ok(Some(entry.clone()));
        }
        let mut names = class.names();
        names.extend(target.names());
        if names.len() > NAME_CAP {
            self.warnings.push(format!(
                "skipping derived bounds for {class}: {} names exceeds the {NAME_CAP}-name cap",
                names.len()
            ));
            return Ok(None);
        }
        let mut sys = AtomSystem::new(names.iter().cloned())?;
        for ((y, z), interval) in self.kb.stats() {
            let mut mentioned = y.names();
            mentioned.extend(z.names());
            if mentioned.iter().all(|n| names.contains(n)) {
                sys.add_stat(y, z, interval)?;
            }
        }
        let interval = sys.bound_conditional(class, target)?;
        let entry = (interval, sys.labels());
        self.derived.insert(key, entry.clone());
        Ok(Some(entry))
    }

    fn collect_pair(
        &mut self,
        subject: &str,
        target: &ClassTerm,
    ) -> Result<Vec<InferenceStructure>, QueryError> {
        let classes = self.closure.classes_of(self.kb, subject, self.config.membership_cap)?;
        let mut out = Vec::new();

        for (class, _) in &classes {
            if let Some(interval) = self.asserted.get(class, target) {
                out.push(InferenceStructure {
                    subject: subject.to_string(),
                    ref_class: RefClass::Term(class.clone()),
                    target: target.clone(),
                    interval: interval.clone(),
                    provenance: Provenance::Asserted,
                });
            }
        }

        if self.config.bounds {
            for (class, _) in &classes {
                if !class.is_intersection() || self.asserted.get(class, target).is_some() {
                    continue;
                }
                if let Some((interval, stats)) = self.derive_bounds(class, target)? {
                    out.push(InferenceStructure {
                        subject: subject.to_string(),
                        ref_class: RefClass::Term(class.clone()),
                        target: target.clone(),
                        interval,
                        provenance: Provenance::Bounds { stats },
                    });
                }
            }
        }

        if self.config.constructions {
            let names = self.kb.memberships_of(subject);
            let mut blocks = self.config.max_bracket_blocks;
            if blocks > 2 && names.len() > 8 {
                self.warnings.push(format!(
                    "bracket enumeration for {subject} limited to 2 blocks ({} membership names)",
                    names.len()
                ));
                blocks = 2;
            }
            for bracket in enumerate_brackets(&names, blocks) {
                let ClassTerm::Bracket(parts) = &bracket else { continue };
                let mut factors: Vec<(ClassTerm, Interval)> = Vec::new();
                for part in parts {
                    let term = term_of(part);
                    match self.lookup(&term, target) {
                        Some(interval) => factors.push((term, interval)),
                        None => {
                            factors.clear();
                            break;
                        }
                    }
                }
                if factors.is_empty() {
                    continue;
                }
                let intervals: Vec<Interval> =
                    factors.iter().map(|(_, i)| i.clone()).collect();
                if self.config.products {
                    out.push(InferenceStructure {
                        subject: subject.to_string(),
                        ref_class: RefClass::Product(
                            factors.iter().map(|(t, _)| t.clone()).collect(),
                        ),
                        target: target.clone(),
                        interval: isx_stat(&intervals),
                        provenance: Provenance::Product { factors: factors.clone() },
                    });
                }
                match isxb_stat(&intervals) {
                    Ok(interval) => out.push(InferenceStructure {
                        subject: subject.to_string(),
                        ref_class: RefClass::Term(bracket.clone()),
                        target: target.clone(),
                        interval,
                        provenance: Provenance::Agreement { factors },
                    }),
                    Err(e) => self.warnings.push(format!(
                        "skipping agreement construction {bracket} toward {target}: {e}"
                    )),
                }
            }
        }

        Ok(out)
    }
}

/// The result of running selection over a candidate pool: the index of the
/// winning structure, if any, and a record of each pass.
pub struct Selection {
    pub winner: Option<usize>,
    pub iterations: Vec<TraceIteration>,
}

/// Runs the selection loop over a strength-ordered candidate pool.
///
/// Candidates are tried strongest first. The current candidate is checked
/// against every structure it disagrees with: dominated rivals are deleted
/// from the queue, but a disagreement the candidate does not dominate fails
/// it, and the next queued candidate is tried. Deletions persist across
/// passes.
pub fn select(pool: &[InferenceStructure], closure: &SubsetClosure) -> Selection {
    let mut choices: Vec<usize> = (0..pool.len()).collect();
    let mut iterations = Vec::new();
    while let Some(&star) = choices.first() {
        let mut deleted: Vec<String> = Vec::new();
        let mut failed = false;
        for (i, other) in pool.iter().enumerate() {
            if i == star || !pool[star].interval.disagrees(&other.interval) {
                continue;
            }
            let forward = reflects(&pool[star], other, closure).is_some();
            let back = reflects(other, &pool[star], closure).is_some();
            if forward && !back {
                if choices.contains(&i) {
                    choices.retain(|&c| c != i);
                    deleted.push(other.ref_class.to_string());
                }
            } else {
                failed = true;
                break;
            }
        }
        iterations.push(TraceIteration {
            selected: pool[star].ref_class.to_string(),
            deleted,
            failed,
        });
        if !failed {
            return Selection { winner: Some(star), iterations };
        }
        choices.retain(|&c| c != star);
    }
    Selection { winner: None, iterations }
}

/// Evaluates the evidential probability of `sentence` against `kb`.
///
/// The returned interval is the selected structure's statistic, or `[0, 1]`
/// when no candidate survives selection. The trace records every candidate
/// considered and each pass of the selection loop.
pub fn prob(
    kb: &KnowledgeBase,
    sentence: &Sentence,
    config: &QueryConfig,
) -> Result<(Interval, Trace), QueryError> {
    let closure = SubsetClosure::build(kb);
    let pairs = target_memberships(kb, sentence)?;

    let mut collector = Collector {
        kb,
        closure: &closure,
        config,
        asserted: StatIndex::from_kb(kb),
        derived: DerivedStats::new(),
        warnings: Vec::new(),
    };
    let mut pool: Vec<InferenceStructure> = Vec::new();
    let mut seen: BTreeSet<(String, String, String)> = BTreeSet::new();
    for (subject, target) in &pairs {
        for s in collector.collect_pair(subject, target)? {
            let key = (s.subject.clone(), s.target.to_string(), s.ref_class.to_string());
            if seen.insert(key) {
                pool.push(s);
            }
        }
    }
    order_by_strength(&mut pool, &closure);

    let mut disagreements: Vec<[usize; 2]> = Vec::new();
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            if pool[i].interval.disagrees(&pool[j].interval) {
                disagreements.push([i, j]);
            }
        }
    }
    let mut reflections: Vec<TraceReflection> = Vec::new();
    for i in 0..pool.len() {
        for j in 0..pool.len() {
            if i == j {
                continue;
            }
            if let Some(rule) = reflects(&pool[i], &pool[j], &closure) {
                reflections.push(TraceReflection { from: i, to: j, rule: rule.label().into() });
            }
        }
    }
    let mut warnings = collector.warnings;
    for r in &reflections {
        if r.from < r.to
            && reflections.iter().any(|b| b.from == r.to && b.to == r.from)
        {
            warnings.push(format!(
                "reflection between {} and {} is mutual; neither can dominate",
                pool[r.from].ref_class, pool[r.to].ref_class
            ));
        }
    }

    let selection = select(&pool, &closure);
    let (interval, outcome) = match selection.winner {
        Some(i) => (pool[i].interval.clone(), "selected"),
        None => (Interval::vacuous(), "fallback"),
    };

    let trace = Trace {
        query: sentence.to_string(),
        equivalences: pairs
            .iter()
            .map(|(individual, class)| {
                Sentence::Membership {
                    individual: individual.clone(),
                    class: class.clone(),
                }
                .to_string()
            })
            .collect(),
        candidates: pool
            .iter()
            .map(|s| TraceCandidate {
                class: s.ref_class.to_string(),
                interval: [s.interval.lo().to_string(), s.interval.hi().to_string()],
                provenance: s.provenance.label().into(),
            })
            .collect(),
        disagreements,
        reflections,
        iterations: selection.iterations,
        outcome: outcome.into(),
        prob: [interval.lo().to_string(), interval.hi().to_string()],
        warnings,
    };
    Ok((interval, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_kb, parse_sentence};
    use crate::rational::ratio;

    fn kb(text: &str) -> KnowledgeBase {
        parse_kb(text).expect("test knowledge base parses")
    }

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(ratio(lo.0, lo.1), ratio(hi.0, hi.1)).unwrap()
    }

    fn ask(kb: &KnowledgeBase, sentence: &str, config: &QueryConfig) -> (Interval, Trace) {
        prob(kb, &parse_sentence(sentence).unwrap(), config).unwrap()
    }

    const METS1: &str = "\
class H\nclass D\nclass K\nclass V\n\
member m H\nmember m D\nmember m K\n\
stat (and H D K) V [0, 1]\nstat H V [0.3, 0.5]\n\
equiv t (member m V)\n";

    const METS2: &str = "\
class H\nclass D\nclass K\nclass V\n\
member m H\nmember m D\nmember m K\n\
stat (and H D K) V [0.1, 0.6]\nstat H V [0.4, 0.8]\n\
equiv t (member m V)\n";

    const CONFLICT: &str = "\
class H\nclass K\nclass V\n\
member m H\nmember m K\n\
stat H V [0.4, 0.8]\nstat K V [0.3, 0.7]\n";

    #[test]
    fn narrow_statistic_beats_the_vacuous_joint() {
        let kb = kb(METS1);
        let (interval, trace) = ask(&kb, "t", &QueryConfig::default());
        assert_eq!(interval, iv((3, 10), (1, 2)));
        assert_eq!(trace.outcome, "selected");
        assert_eq!(trace.iterations.last().unwrap().selected, "H");
        assert!(trace.candidates.iter().any(|c| c.class == "D&H&K"));
        assert!(trace.disagreements.is_empty());
        assert_eq!(trace.equivalences, vec!["(member m V)"]);
    }

    #[test]
    fn narrower_class_wins_a_disagreement_by_subset() {
        let kb = kb(METS2);
        let (interval, trace) = ask(&kb, "t", &QueryConfig::default());
        assert_eq!(interval, iv((1, 10), (3, 5)));
        assert_eq!(trace.iterations.last().unwrap().selected, "D&H&K");
        assert!(trace
            .reflections
            .iter()
            .any(|r| r.rule == "subset"
                && trace.candidates[r.from].class == "D&H&K"
                && trace.candidates[r.to].class == "H"));
        // H is tried first (narrower interval) and fails against the joint.
        assert!(trace.iterations[0].failed);
        assert_eq!(trace.iterations[0].selected, "H");
        assert!(!trace.iterations[1].failed);
    }

    #[test]
    fn dominated_weaker_candidates_are_deleted_from_the_queue() {
        let kb = kb("class D\nclass H\nclass V\n\
                     member m D\nmember m H\n\
                     stat (and D H) V [0.1, 0.3]\nstat H V [0.25, 0.5]\n");
        let (interval, trace) = ask(&kb, "(member m V)", &QueryConfig::default());
        assert_eq!(interval, iv((1, 10), (3, 10)));
        assert_eq!(trace.iterations.len(), 1);
        let first = &trace.iterations[0];
        assert_eq!(first.selected, "D&H");
        assert!(!first.failed);
        assert_eq!(first.deleted, vec!["H"]);
    }

    #[test]
    fn conflicting_peers_fall_back_without_constructions() {
        let kb = kb(CONFLICT);
        let config = QueryConfig { constructions: false, ..QueryConfig::default() };
        let (interval, trace) = ask(&kb, "(member m V)", &config);
        assert_eq!(interval, Interval::vacuous());
        assert_eq!(trace.outcome, "fallback");
        assert!(trace.iterations.iter().all(|i| i.failed));
    }

    #[test]
    fn agreement_construction_resolves_the_conflict() {
        let kb = kb(CONFLICT);
        let (interval, trace) = ask(&kb, "(member m V)", &QueryConfig::default());
        assert_eq!(interval, iv((2, 9), (28, 31)));
        let last = trace.iterations.last().unwrap();
        assert_eq!(last.selected, "[H,K]");
        assert!(!last.failed);
        let winner = trace.candidates.iter().find(|c| c.class == "[H,K]").unwrap();
        assert_eq!(winner.provenance, "agreement");
        assert!(trace
            .reflections
            .iter()
            .any(|r| r.rule == "construction"
                && trace.candidates[r.from].class == "[H,K]"
                && trace.candidates[r.to].class == "H×K"));
    }

    #[test]
    fn products_are_never_selected_over_their_agreement_peer() {
        let kb = kb(CONFLICT);
        let config = QueryConfig { products: false, ..QueryConfig::default() };
        let (interval, _) = ask(&kb, "(member m V)", &config);
        assert_eq!(interval, iv((2, 9), (28, 31)));
    }

    #[test]
    fn no_statistics_means_the_vacuous_fallback() {
        let kb = kb("class H\nclass V\nmember m H\n");
        let (interval, trace) = ask(&kb, "(member m V)", &QueryConfig::default());
        assert_eq!(interval, Interval::vacuous());
        assert_eq!(trace.outcome, "fallback");
        assert!(trace.candidates.is_empty());
    }

    #[test]
    fn equivalences_chain_in_both_directions() {
        let kb = kb("class V\nclass H\nmember m H\nstat H V [0.3, 0.5]\n\
                     equiv t s\nequiv s (member m V)\n");
        let (interval, trace) = ask(&kb, "t", &QueryConfig::default());
        assert_eq!(interval, iv((3, 10), (1, 2)));
        assert_eq!(trace.equivalences, vec!["(member m V)"]);

        let pairs =
            target_memberships(&kb, &parse_sentence("(member m V)").unwrap()).unwrap();
        assert_eq!(pairs, vec![("m".to_string(), ClassTerm::prim("V"))]);
    }

    #[test]
    fn unresolvable_and_unknown_subjects_are_errors() {
        let kb = kb(METS1);
        let err = prob(&kb, &parse_sentence("u").unwrap(), &QueryConfig::default())
            .unwrap_err();
        assert!(matches!(err, QueryError::Unresolvable(_)));
        let err = prob(
            &kb,
            &parse_sentence("(member nobody V)").unwrap(),
            &QueryConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            QueryError::Membership(MembershipError::UnknownIndividual(_))
        ));
    }

    #[test]
    fn derived_bounds_supply_missing_intersection_statistics() {
        let kb = kb("class H\nclass K\nclass V\n\
                     member m H\nmember m K\n\
                     stat H V [0.4, 0.8]\nstat H K [1, 1]\n");
        let config = QueryConfig { bounds: true, ..QueryConfig::default() };
        let (interval, trace) = ask(&kb, "(member m V)", &config);
        assert_eq!(interval, iv((2, 5), (4, 5)));
        let winner = trace.iterations.last().unwrap();
        assert_eq!(winner.selected, "H&K");
        let candidate = trace.candidates.iter().find(|c| c.class == "H&K").unwrap();
        assert_eq!(candidate.provenance, "bounds");
    }

    #[test]
    fn oversized_bounds_systems_are_skipped_with_a_warning() {
        let mut text = String::new();
        for name in ["A", "B", "C", "E", "F", "G", "V"] {
            text.push_str(&format!("class {name}\n"));
        }
        for name in ["A", "B", "C", "E", "F", "G"] {
            text.push_str(&format!("member m {name}\n"));
        }
        let kb = kb(&text);
        let config =
            QueryConfig { bounds: true, constructions: false, ..QueryConfig::default() };
        let (interval, trace) = ask(&kb, "(member m V)", &config);
        assert_eq!(interval, Interval::vacuous());
        assert!(trace.warnings.iter().any(|w| w.contains("6-name cap")));
    }

    #[test]
    fn contradictory_certainties_skip_the_construction_with_a_warning() {
        let kb = kb("class H\nclass K\nclass V\n\
                     member m H\nmember m K\n\
                     stat H V [1, 1]\nstat K V [0, 0]\n");
        let (interval, trace) = ask(&kb, "(member m V)", &QueryConfig::default());
        assert!(trace.warnings.iter().any(|w| w.contains("[H,K]")));
        assert!(trace.candidates.iter().all(|c| c.class != "[H,K]"));
        // The point intervals [1,1] and [0,0] disagree and neither reflects
        // the other; the product construction survives but disagrees with
        // both factors, so nothing is selectable.
        assert_eq!(interval, Interval::vacuous());
        assert_eq!(trace.outcome, "fallback");
    }

    #[test]
    fn mutual_subset_classes_surface_a_warning() {
        let kb = kb("class H\nclass G\nclass V\n\
                     subset H G\nsubset G H\n\
                     member m H\nmember m G\n\
                     stat H V [0.2, 0.4]\nstat G V [0.5, 0.9]\n");
        let (_, trace) = ask(&kb, "(member m V)", &QueryConfig::default());
        assert!(trace.warnings.iter().any(|w| w.contains("mutual")));
    }

    #[test]
    fn wide_statistics_still_count_as_candidates() {
        let kb = kb("class H\nclass V\nmember m H\nstat H V [0, 1]\n");
        let (interval, trace) = ask(&kb, "(member m V)", &QueryConfig::default());
        assert_eq!(interval, Interval::vacuous());
        assert_eq!(trace.outcome, "selected");
        assert_eq!(trace.candidates.len(), 1);
    }
}
