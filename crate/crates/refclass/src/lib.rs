//! Evidential probability over interval-valued frequency knowledge.
//!
//! Given a knowledge base of class memberships, subset assertions, and
//! interval-valued frequency statistics, `refclass` answers "how probable is
//! this sentence?" by finding every reference class the evidence offers,
//! deriving statistics for combination classes the base never mentions, and
//! selecting the strongest candidate that dominates everything it conflicts
//! with. The answer is itself an interval with exact rational endpoints.

pub mod bounds;
pub mod closure;
pub mod construct;
pub mod engine;
pub mod interval;
pub mod kb;
pub mod parser;
pub mod rational;
mod simplex;
pub mod structure;
pub mod term;
pub mod trace;

pub use closure::{MembershipOrigin, SubsetClosure};
pub use engine::{prob, select, target_memberships, QueryConfig, QueryError, Selection};
pub use interval::{Interval, IntervalError, StrengthOrder};
pub use kb::{Diagnostic, DiagnosticKind, KbDocument, KnowledgeBase, Sentence, Span, StatIndex};
pub use parser::{parse_document, parse_kb, parse_kb_with, parse_sentence};
pub use rational::{ratio, Rational};
pub use structure::{
    dominates, order_by_strength, reflects, InferenceStructure, Provenance, RefClass,
    ReflectionRule,
};
pub use term::{ClassTerm, TermError};
pub use trace::Trace;

/// Compiles and runs every code block in the guide under `cargo test --doc`.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/intervals.md")]
    pub struct Intervals;
    #[doc = include_str!("../../../book/src/classes.md")]
    pub struct Classes;
    #[doc = include_str!("../../../book/src/language.md")]
    pub struct Language;
    #[doc = include_str!("../../../book/src/discovery.md")]
    pub struct Discovery;
    #[doc = include_str!("../../../book/src/combinations.md")]
    pub struct Combinations;
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub struct Bounds;
    #[doc = include_str!("../../../book/src/selection.md")]
    pub struct Selection;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
