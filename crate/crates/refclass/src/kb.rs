//! Knowledge bases and their validation.
//!
//! A parsed file becomes a [`KbDocument`]: raw statements with source
//! positions. Validation turns a document into a [`KnowledgeBase`], the
//! deduplicated, canonicalized form the rest of the engine works against.
//! Anything wrong at either stage is reported as a [`Diagnostic`] with the
//! offending position; validation keeps going after an error so one pass
//! reports everything.

use crate::interval::Interval;
use crate::term::{ClassTerm, NameSet};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Span {
        Span { line, col }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    ClassDecl(String),
    Member { individual: String, class: ClassTerm },
    Subset { sub: ClassTerm, sup: ClassTerm },
    Stat { class: ClassTerm, target: ClassTerm, interval: Interval },
    Equiv { name: String, sentence: Sentence },
}

/// A sentence the engine can assign a probability to: either a declared
/// sentence name or a membership claim about one individual.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sentence {
    Name(String),
    Membership { individual: String, class: ClassTerm },
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sentence::Name(n) => f.write_str(n),
            Sentence::Membership { individual, class } => {
                write!(f, "(member {} {})", individual, class_source(class))
            }
        }
    }
}

/// Raw parse output: statements in file order with their positions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KbDocument {
    pub statements: Vec<(Statement, Span)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    UndeclaredName,
    InvalidInterval,
    DuplicateStatistic,
    MinimalMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn new(span: Span, kind: DiagnosticKind, message: impl Into<String>) -> Diagnostic {
        Diagnostic { span, kind, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.span.line, self.span.col, self.message)
    }
}

/// Validation switches. Minimal mode models a language of primitive names
/// only: no subset assertions, and statistic reference classes must be
/// primitives or intersections of names some individual is asserted to
/// belong to (classes nameable without a set vocabulary).
#[derive(Clone, Copy, Debug, Default)]
pub struct ValidateOptions {
    pub minimal: bool,
}

/// A validated knowledge base in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    classes: BTreeSet<String>,
    memberships: BTreeMap<String, NameSet>,
    individuals: BTreeSet<String>,
    subsets: BTreeSet<(ClassTerm, ClassTerm)>,
    stats: BTreeMap<(ClassTerm, ClassTerm), Interval>,
    equivs: BTreeSet<(String, Sentence)>,
}

impl KnowledgeBase {
    pub fn from_document(
        doc: &KbDocument,
        options: ValidateOptions,
    ) -> Result<KnowledgeBase, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let mut kb = KnowledgeBase::default();

        for (stmt, _) in &doc.statements {
            if let Statement::ClassDecl(name) = stmt {
                kb.classes.insert(name.clone());
            }
        }
        // Memberships before the minimal-mode statistic check, which needs them.
        for (stmt, span) in &doc.statements {
            if let Statement::Member { individual, class } = stmt {
                check_declared(&kb.classes, class, *span, &mut diags);
                kb.individuals.insert(individual.clone());
                kb.memberships
                    .entry(individual.clone())
                    .or_default()
                    .extend(class.names());
            }
        }

        // Statistics grouped per canonical (class, target) pair: nested
        // duplicates collapse to the narrowest, incomparable ones are errors.
        let mut stat_groups: BTreeMap<(ClassTerm, ClassTerm), Vec<(Interval, Span)>> =
            BTreeMap::new();

        for (stmt, span) in &doc.statements {
            match stmt {
                Statement::ClassDecl(_) | Statement::Member { .. } => {}
                Statement::Subset { sub, sup } => {
                    check_declared(&kb.classes, sub, *span, &mut diags);
                    check_declared(&kb.classes, sup, *span, &mut diags);
                    if options.minimal {
                        diags.push(Diagnostic::new(
                            *span,
                            DiagnosticKind::MinimalMode,
                            "subset assertions are not part of the minimal language",
                        ));
                        continue;
                    }
                    kb.subsets.insert((sub.clone(), sup.clone()));
                }
                Statement::Stat { class, target, interval } => {
                    check_declared(&kb.classes, class, *span, &mut diags);
                    check_declared(&kb.classes, target, *span, &mut diags);
                    if options.minimal && class.is_intersection() {
                        let names = class.names();
                        let covered = kb
                            .memberships
                            .values()
                            .any(|have| names.iter().all(|n| have.contains(n)));
                        if !covered {
                            diags.push(Diagnostic::new(
                                *span,
                                DiagnosticKind::MinimalMode,
                                format!(
                                    "minimal mode: reference class {} is not an intersection of any individual's memberships",
                                    class
                                ),
                            ));
                            continue;
                        }
                    }
                    stat_groups
                        .entry((class.clone(), target.clone()))
                        .or_default()
                        .push((interval.clone(), *span));
                }
                Statement::Equiv { name, sentence } => {
                    if let Sentence::Membership { individual, class } = sentence {
                        check_declared(&kb.classes, class, *span, &mut diags);
                        kb.individuals.insert(individual.clone());
                    }
                    kb.equivs.insert((name.clone(), sentence.clone()));
                }
            }
        }

        for ((class, target), group) in stat_groups {
            let mut best: Option<(Interval, Span)> = None;
            let mut ok = true;
            for (interval, span) in &group {
                match &mut best {
                    None => best = Some((interval.clone(), *span)),
                    Some((narrowest, _)) => {
                        if interval.nests_in(narrowest) {
                            *narrowest = interval.clone();
                        } else if !narrowest.nests_in(interval) {
                            diags.push(Diagnostic::new(
                                *span,
                                DiagnosticKind::DuplicateStatistic,
                                format!(
                                    "conflicting statistics for ({}, {}): {} is incomparable with {}",
                                    class, target, interval, narrowest
                                ),
                            ));
                            ok = false;
                        }
                    }
                }
            }
            if ok {
                if let Some((interval, _)) = best {
                    kb.stats.insert((class, target), interval);
                }
            }
        }

        if diags.is_empty() {
            Ok(kb)
        } else {
            diags.sort_by_key(|d| d.span);
            Err(diags)
        }
    }

    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.individuals
    }

    pub fn is_individual(&self, name: &str) -> bool {
        self.individuals.contains(name)
    }

    /// Asserted primitive memberships of one individual (empty if the
    /// individual is known only from an equivalence sentence).
    pub fn memberships_of(&self, individual: &str) -> NameSet {
        self.memberships.get(individual).cloned().unwrap_or_default()
    }

    pub fn subsets(&self) -> impl Iterator<Item = &(ClassTerm, ClassTerm)> {
        self.subsets.iter()
    }

    pub fn stats(&self) -> impl Iterator<Item = (&(ClassTerm, ClassTerm), &Interval)> {
        self.stats.iter()
    }

    pub fn stat(&self, class: &ClassTerm, target: &ClassTerm) -> Option<&Interval> {
        self.stats.get(&(class.clone(), target.clone()))
    }

    pub fn equivs(&self) -> impl Iterator<Item = &(String, Sentence)> {
        self.equivs.iter()
    }

    /// Renders the base back to source syntax in a fixed order. Parsing the
    /// result reproduces this knowledge base exactly.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for c in &self.classes {
            out.push_str(&format!("class {c}\n"));
        }
        for (x, names) in &self.memberships {
            for n in names {
                out.push_str(&format!("member {x} {n}\n"));
            }
        }
        for (sub, sup) in &self.subsets {
            out.push_str(&format!("subset {} {}\n", class_source(sub), class_source(sup)));
        }
        for ((y, z), interval) in &self.stats {
            out.push_str(&format!(
                "stat {} {} [{}, {}]\n",
                class_source(y),
                class_source(z),
                interval.lo(),
                interval.hi()
            ));
        }
        for (name, sentence) in &self.equivs {
            out.push_str(&format!("equiv {name} {sentence}\n"));
        }
        out
    }
}

/// Source syntax for a class term. Brackets have no source form; they only
/// exist as derived classes, so this is restricted to assertable terms.
pub fn class_source(term: &ClassTerm) -> String {
    match term {
        ClassTerm::Prim(p) => p.clone(),
        ClassTerm::Intersect(names) => {
            format!("(and {})", names.iter().cloned().collect::<Vec<_>>().join(" "))
        }
        ClassTerm::Bracket(_) => term.to_string(),
    }
}

fn check_declared(
    classes: &BTreeSet<String>,
    term: &ClassTerm,
    span: Span,
    diags: &mut Vec<Diagnostic>,
) {
    for name in term.names() {
        if !classes.contains(&name) {
            diags.push(Diagnostic::new(
                span,
                DiagnosticKind::UndeclaredName,
                format!("undeclared class '{name}'"),
            ));
        }
    }
}

/// Index of frequency statistics by (reference class, target). Starts from a
/// base's asserted statistics; the engine adds derived entries so bracket
/// construction can see them.
#[derive(Clone, Debug, Default)]
pub struct StatIndex {
    map: BTreeMap<(ClassTerm, ClassTerm), Interval>,
}

impl StatIndex {
    pub fn from_kb(kb: &KnowledgeBase) -> StatIndex {
        StatIndex { map: kb.stats.clone() }
    }

    pub fn insert(&mut self, class: ClassTerm, target: ClassTerm, interval: Interval) {
        self.map.insert((class, target), interval);
    }

    pub fn get(&self, class: &ClassTerm, target: &ClassTerm) -> Option<&Interval> {
        self.map.get(&(class.clone(), target.clone()))
    }
}
